use serde::{Deserialize, Serialize};

use super::matrix::SquareMatrix;
use super::pattern::{nondecreasing, strictly_increasing, CoalescencePattern, ColumnRole, WallParticlePattern};
use crate::error::{Error, Result};
use crate::kernels::{ContinuousKernel, DiscreteKernel, TransitionKernel};

/// Negative determinants down to this value are treated as rounding noise.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// A determinant after the sign/range policy has been applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetOutcome {
    /// Reported value.
    pub value: f64,
    /// Determinant as computed.
    pub raw: f64,
    /// Set when `value` differs from `raw` by clamping.
    pub clamped: bool,
}

impl DetOutcome {
    pub fn exact_zero() -> Self {
        Self { value: 0.0, raw: 0.0, clamped: false }
    }

    /// Clamps `[-CLAMP_TOLERANCE, 0)` to zero and rejects anything below.
    pub fn nonnegative(raw: f64) -> Result<Self> {
        if raw < -CLAMP_TOLERANCE {
            Err(Error::NegativeDeterminant { value: raw })
        } else if raw < 0.0 {
            Ok(Self { value: 0.0, raw, clamped: true })
        } else {
            Ok(Self { value: raw, raw, clamped: false })
        }
    }

    /// Clamps into `[0, 1]`; the flag is raised only when the excursion
    /// exceeds `CLAMP_TOLERANCE`.
    pub fn probability(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        let clamped = !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&raw);
        Self { value, raw, clamped }
    }
}

/// Matrix row in a grid-refined determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefinedRow {
    /// `p_x`, `F_x - [i < j]` entries for a particle started at `x`.
    Value(f64),
    /// `∂ₓp_x`, `∂ₓF_x` entries: the limit of a flanking row pair.
    SourceDerivative(f64),
}

/// Warren threshold: a finite site or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Threshold<S> {
    Finite(S),
    Infinite,
}

impl<S: PartialOrd> Threshold<S> {
    fn le(&self, other: &Self) -> bool {
        match (self, other) {
            (_, Threshold::Infinite) => true,
            (Threshold::Infinite, Threshold::Finite(_)) => false,
            (Threshold::Finite(a), Threshold::Finite(b)) => a <= b,
        }
    }
}

/// `F(x, y) - [shifted]`, with `F - 1` taken as `-(1 - F)` so that small
/// survival masses keep their relative precision.
fn staircase<K: TransitionKernel>(kernel: &K, x: K::Site, y: K::Site, shifted: bool) -> Result<f64> {
    if shifted {
        Ok(-kernel.survival(x, y)?)
    } else {
        kernel.cumulative(x, y)
    }
}

/// Fills an `n x n` matrix column by column from the pattern roles.
fn assemble<S: Copy>(
    pattern: &CoalescencePattern,
    survivors: &[S],
    mut entry: impl FnMut(usize, usize, ColumnRole, S) -> Result<f64>,
) -> Result<SquareMatrix> {
    let roles = pattern.column_roles();
    let n = roles.len();
    let mut entries = vec![0.0; n * n];
    for (j, role) in roles.iter().enumerate() {
        let y = survivors[role.block];
        for i in 0..n {
            entries[i * n + j] = entry(i, j, *role, y)?;
        }
    }
    SquareMatrix::new(n, entries)
}

fn check_shapes<S: PartialOrd + std::fmt::Debug>(
    starts: &[S],
    pattern: &CoalescencePattern,
    survivors: &[S],
) -> Result<()> {
    if starts.len() != pattern.particles() {
        return Err(Error::InvalidInput(format!(
            "pattern {:?} needs {} starts, got {}",
            pattern.parts(),
            pattern.particles(),
            starts.len()
        )));
    }
    if survivors.len() != pattern.survivors() {
        return Err(Error::InvalidInput(format!(
            "pattern {:?} needs {} survivors, got {}",
            pattern.parts(),
            pattern.survivors(),
            survivors.len()
        )));
    }
    if !strictly_increasing(starts) {
        return Err(Error::InvalidInput(format!("starts must be strictly increasing: {starts:?}")));
    }
    if !strictly_increasing(survivors) {
        return Err(Error::InvalidInput(format!("survivors must be strictly increasing: {survivors:?}")));
    }
    Ok(())
}

/// Row-level coalescence matrix: column `j` of block `l` holds
/// `P(x_i, y_l)` if it leads its block and `F(x_i, y_l) - [i < j]` otherwise.
pub fn coalescence_matrix<K: TransitionKernel>(
    kernel: &K,
    starts: &[K::Site],
    pattern: &CoalescencePattern,
    survivors: &[K::Site],
) -> Result<SquareMatrix> {
    check_shapes(starts, pattern, survivors)?;
    assemble(pattern, survivors, |i, j, role, y| {
        let x = starts[i];
        if role.leading {
            kernel.transition(x, y)
        } else {
            staircase(kernel, x, y, i < j)
        }
    })
}

/// Whether every survivor can be reached by the particles of its block.
fn pattern_admissible<K: TransitionKernel>(
    kernel: &K,
    starts: &[K::Site],
    pattern: &CoalescencePattern,
    survivors: &[K::Site],
) -> bool {
    pattern
        .block_starts()
        .iter()
        .zip(pattern.parts())
        .zip(survivors)
        .all(|((&first, &len), &y)| starts[first..first + len].iter().all(|&x| kernel.reachable(x, y)))
}

/// Probability (discrete) or joint density (continuous) that the particles
/// coalesce according to `pattern` with survivors at `survivors`.
pub fn coalescence_probability<K: TransitionKernel>(
    kernel: &K,
    starts: &[K::Site],
    pattern: &CoalescencePattern,
    survivors: &[K::Site],
) -> Result<DetOutcome> {
    check_shapes(starts, pattern, survivors)?;
    if !pattern_admissible(kernel, starts, pattern, survivors) {
        return Ok(DetOutcome::exact_zero());
    }
    let m = coalescence_matrix(kernel, starts, pattern, survivors)?;
    DetOutcome::nonnegative(m.determinant()?)
}

/// Integer flanking sites `(a_1, b_1, …, a_k, b_k)` of lattice walls.
pub fn flanking_sites(kernel: &DiscreteKernel, walls: &[f64]) -> Result<Vec<i64>> {
    let half = kernel.lattice_step() as f64 / 2.0;
    let mut sites = Vec::with_capacity(2 * walls.len());
    for &w in walls {
        for s in [w - half, w + half] {
            if s.fract() != 0.0 || s.abs() > 1e15 {
                return Err(Error::InvalidInput(format!(
                    "wall {w} does not sit between two lattice sites at spacing {}",
                    kernel.lattice_step()
                )));
            }
            let site = s as i64;
            if !kernel.is_occupied_site(site) {
                return Err(Error::InvalidInput(format!("wall {w} is flanked by unoccupied site {site}")));
            }
            sites.push(site);
        }
    }
    if !strictly_increasing(&sites) {
        return Err(Error::InvalidInput(format!("walls {walls:?} are too close: flanking sites overlap")));
    }
    Ok(sites)
}

/// `2k x 2k` wall-particle matrix on the lattice: the coalescence matrix
/// for starts `(a_1, b_1, …, a_k, b_k)` under `1 + 2 + … + 2 + 1`.
pub fn wall_particle_matrix(kernel: &DiscreteKernel, pattern: &WallParticlePattern<i64>) -> Result<SquareMatrix> {
    multi_pattern_matrix(kernel, std::slice::from_ref(pattern))
}

/// Probability that the walls and survivors of `pattern` occur as
/// consecutive elements of the wall-particle configuration.
pub fn wall_particle_probability(kernel: &DiscreteKernel, pattern: &WallParticlePattern<i64>) -> Result<DetOutcome> {
    multi_pattern_probability(kernel, std::slice::from_ref(pattern))
}

fn concat_patterns(
    kernel: &DiscreteKernel,
    patterns: &[WallParticlePattern<i64>],
) -> Result<(Vec<i64>, CoalescencePattern, Vec<i64>)> {
    if patterns.is_empty() {
        return Err(Error::InvalidInput("at least one pattern is required".into()));
    }
    let mut walls = Vec::new();
    let mut survivors = Vec::new();
    let mut parts = Vec::new();
    for p in patterns {
        walls.extend_from_slice(p.walls());
        survivors.extend_from_slice(p.survivors());
        parts.extend_from_slice(CoalescencePattern::wall_particle(p.k())?.parts());
    }
    if !strictly_increasing(&walls) || !strictly_increasing(&survivors) {
        return Err(Error::InvalidInput("patterns overlap: walls and survivors must increase across patterns".into()));
    }
    let starts = flanking_sites(kernel, &walls)?;
    Ok((starts, CoalescencePattern::new(parts)?, survivors))
}

/// Matrix for several separated patterns observed simultaneously. Each
/// pattern keeps its own `1 + 2 + … + 2 + 1` columns; boundary survivors of
/// neighbouring patterns get single `P` columns.
pub fn multi_pattern_matrix(kernel: &DiscreteKernel, patterns: &[WallParticlePattern<i64>]) -> Result<SquareMatrix> {
    let (starts, composition, survivors) = concat_patterns(kernel, patterns)?;
    coalescence_matrix(kernel, &starts, &composition, &survivors)
}

pub fn multi_pattern_probability(
    kernel: &DiscreteKernel,
    patterns: &[WallParticlePattern<i64>],
) -> Result<DetOutcome> {
    let (starts, composition, survivors) = concat_patterns(kernel, patterns)?;
    coalescence_probability(kernel, &starts, &composition, &survivors)
}

/// Coalescence matrix for a continuous kernel whose rows may be source
/// derivatives. Staircase shifts apply to value rows only; a derivative row
/// is the limit of two value rows that share the same shift.
pub fn refined_matrix(
    kernel: &ContinuousKernel,
    rows: &[RefinedRow],
    pattern: &CoalescencePattern,
    survivors: &[f64],
) -> Result<SquareMatrix> {
    if rows.len() != pattern.particles() || survivors.len() != pattern.survivors() {
        return Err(Error::InvalidInput(format!(
            "{} rows and {} survivors do not fit pattern {:?}",
            rows.len(),
            survivors.len(),
            pattern.parts()
        )));
    }
    if !strictly_increasing(survivors) {
        return Err(Error::InvalidInput(format!("survivors must be strictly increasing: {survivors:?}")));
    }
    assemble(pattern, survivors, |i, j, role, y| match rows[i] {
        RefinedRow::Value(x) if role.leading => kernel.density(x, y),
        RefinedRow::Value(x) => staircase(kernel, x, y, i < j),
        RefinedRow::SourceDerivative(x) if role.leading => kernel.d_source_density(x, y),
        RefinedRow::SourceDerivative(x) => kernel.d_source_cdf(x, y),
    })
}

fn wall_rows(walls: &[f64]) -> impl Iterator<Item = RefinedRow> + '_ {
    walls.iter().flat_map(|&x| [RefinedRow::Value(x), RefinedRow::SourceDerivative(x)])
}

/// `M₀` for coalescing Brownian motions: a density row and a
/// source-derivative row per wall, columns `1 + 2 + … + 2 + 1`.
pub fn brownian_m0(pattern: &WallParticlePattern<f64>, horizon: f64) -> Result<SquareMatrix> {
    let kernel = ContinuousKernel::gaussian(horizon)?;
    let rows: Vec<RefinedRow> = wall_rows(pattern.walls()).collect();
    refined_matrix(&kernel, &rows, &CoalescencePattern::wall_particle(pattern.k())?, pattern.survivors())
}

/// Wall-particle intensity `det M₀` of coalescing Brownian motions.
pub fn brownian_intensity(pattern: &WallParticlePattern<f64>, horizon: f64) -> Result<DetOutcome> {
    DetOutcome::nonnegative(brownian_m0(pattern, horizon)?.determinant()?)
}

/// `(2k+1) x (2k+1)` matrix for reflected Brownian motions on `[0, ∞)`:
/// a value row for the particle at the boundary, then the wall row pairs,
/// columns `2 + 2 + … + 2 + 1`.
pub fn halfline_m0(pattern: &WallParticlePattern<f64>, horizon: f64) -> Result<SquareMatrix> {
    if pattern.walls()[0] <= 0.0 || pattern.survivors()[0] <= 0.0 {
        return Err(Error::Domain("half-line walls and survivors must be positive".into()));
    }
    let kernel = ContinuousKernel::reflected_gaussian(horizon)?;
    let rows: Vec<RefinedRow> = std::iter::once(RefinedRow::Value(0.0)).chain(wall_rows(pattern.walls())).collect();
    refined_matrix(&kernel, &rows, &CoalescencePattern::half_line(pattern.k())?, pattern.survivors())
}

pub fn halfline_intensity(pattern: &WallParticlePattern<f64>, horizon: f64) -> Result<DetOutcome> {
    DetOutcome::nonnegative(halfline_m0(pattern, horizon)?.determinant()?)
}

/// Wall-particle matrix for a continuous kernel started from a grid of
/// spacing `spacing`: flanks at `x ∓ spacing/2`. Its determinant divided by
/// `spacing^k` approaches `det M₀`.
pub fn grid_wall_particle_matrix(
    kernel: &ContinuousKernel,
    pattern: &WallParticlePattern<f64>,
    spacing: f64,
) -> Result<SquareMatrix> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidInput(format!("grid spacing must be positive, got {spacing}")));
    }
    let starts: Vec<f64> = pattern.walls().iter().flat_map(|&x| [x - spacing / 2.0, x + spacing / 2.0]).collect();
    coalescence_matrix(kernel, &starts, &CoalescencePattern::wall_particle(pattern.k())?, pattern.survivors())
}

/// `M^W_ij = F(x_i, y_j) - [i < j]`.
pub fn warren_matrix<K: TransitionKernel>(
    kernel: &K,
    starts: &[K::Site],
    thresholds: &[Threshold<K::Site>],
) -> Result<SquareMatrix> {
    if starts.len() != thresholds.len() || starts.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{} starts and {} thresholds: need equal, nonzero counts",
            starts.len(),
            thresholds.len()
        )));
    }
    if !strictly_increasing(starts) {
        return Err(Error::InvalidInput(format!("starts must be strictly increasing: {starts:?}")));
    }
    if !thresholds.windows(2).all(|w| w[0].le(&w[1])) {
        return Err(Error::InvalidInput(format!("thresholds must be nondecreasing: {thresholds:?}")));
    }
    let n = starts.len();
    let mut entries = Vec::with_capacity(n * n);
    for (i, &x) in starts.iter().enumerate() {
        for (j, t) in thresholds.iter().enumerate() {
            entries.push(match *t {
                Threshold::Infinite => {
                    if i < j {
                        0.0
                    } else {
                        1.0
                    }
                }
                Threshold::Finite(y) => staircase(kernel, x, y, i < j)?,
            });
        }
    }
    SquareMatrix::new(n, entries)
}

/// `P(Z_T(x_i) <= y_i for all i)` for coalescing walkers from `starts`.
pub fn warren_cdf<K: TransitionKernel>(
    kernel: &K,
    starts: &[K::Site],
    thresholds: &[Threshold<K::Site>],
) -> Result<DetOutcome> {
    Ok(DetOutcome::probability(warren_matrix(kernel, starts, thresholds)?.determinant()?))
}

/// Finite thresholds convenience wrapper.
pub fn finite_thresholds<S: Copy + PartialOrd>(ys: &[S]) -> Result<Vec<Threshold<S>>> {
    if !nondecreasing(ys) {
        return Err(Error::InvalidInput("thresholds must be nondecreasing".into()));
    }
    Ok(ys.iter().map(|&y| Threshold::Finite(y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::normal_pdf;

    fn parity(steps: u64) -> DiscreteKernel {
        DiscreteKernel::parity_walk(steps, 0).unwrap()
    }

    #[test]
    fn pattern_two_plus_one_layout() {
        let k = DiscreteKernel::ct_simple_walk(0.7).unwrap();
        let xs = [0, 1, 3];
        let ys = [1, 4];
        let pat = CoalescencePattern::new(vec![2, 1]).unwrap();
        let m = coalescence_matrix(&k, &xs, &pat, &ys).unwrap();
        for i in 0..3 {
            assert_eq!(m.get(i, 0), k.point_prob(xs[i], 1).unwrap());
            assert_eq!(m.get(i, 2), k.point_prob(xs[i], 4).unwrap());
        }
        let f0 = k.cumulative(0, 1).unwrap();
        assert!((m.get(0, 1) - (f0 - 1.0)).abs() < 1e-15);
        assert_eq!(m.get(1, 1), k.cumulative(1, 1).unwrap());
        assert_eq!(m.get(2, 1), k.cumulative(3, 1).unwrap());
    }

    #[test]
    fn single_particle_is_transition() {
        let k = DiscreteKernel::ct_simple_walk(1.3).unwrap();
        let pat = CoalescencePattern::new(vec![1]).unwrap();
        let p = coalescence_probability(&k, &[2], &pat, &[-1]).unwrap();
        assert_eq!(p.value, k.point_prob(2, -1).unwrap());
        assert_eq!(coalescence_matrix(&k, &[2], &pat, &[-1]).unwrap().order(), 1);
    }

    #[test]
    fn inadmissible_survivors_give_exact_zero() {
        let k = parity(2);
        let pat = CoalescencePattern::new(vec![1, 1]).unwrap();
        let p = coalescence_probability(&k, &[0, 2], &pat, &[-1, 2]).unwrap();
        assert_eq!(p, DetOutcome::exact_zero());
    }

    #[test]
    fn k1_wall_particle_is_karlin_mcgregor() {
        let k = parity(3);
        let pat = WallParticlePattern::new(vec![1.0], vec![-1, 3]).unwrap();
        let m = wall_particle_matrix(&k, &pat).unwrap();
        assert_eq!(m.order(), 2);
        let expected = k.point_prob(0, -1).unwrap() * k.point_prob(2, 3).unwrap()
            - k.point_prob(0, 3).unwrap() * k.point_prob(2, -1).unwrap();
        assert!((m.determinant().unwrap() - expected).abs() < 1e-16);
    }

    #[test]
    fn k2_wall_particle_layout() {
        let k = DiscreteKernel::ct_simple_walk(1.0).unwrap();
        let pat = WallParticlePattern::new(vec![0.5, 3.5], vec![-1, 2, 5]).unwrap();
        let m = wall_particle_matrix(&k, &pat).unwrap();
        let (a1, b1, a2, b2) = (0, 1, 3, 4);
        assert!((m.get(0, 2) - (k.cumulative(a1, 2).unwrap() - 1.0)).abs() < 1e-15);
        assert!((m.get(1, 2) - (k.cumulative(b1, 2).unwrap() - 1.0)).abs() < 1e-15);
        assert_eq!(m.get(2, 2), k.cumulative(a2, 2).unwrap());
        assert_eq!(m.get(3, 2), k.cumulative(b2, 2).unwrap());
        assert_eq!(m.get(3, 3), k.point_prob(b2, 5).unwrap());
    }

    #[test]
    fn block_and_row_staircases_agree() {
        let k = DiscreteKernel::ct_simple_walk(2.0).unwrap();
        let walls = vec![-3.5, -0.5, 1.5, 6.5];
        let survivors = vec![-6, -2, 0, 4, 9];
        let pat = WallParticlePattern::new(walls.clone(), survivors.clone()).unwrap();
        let m = wall_particle_matrix(&k, &pat).unwrap();
        let starts = flanking_sites(&k, &walls).unwrap();
        // block view: the F column of survivor l carries -1 in rows of walls p < l
        for (i, &x) in starts.iter().enumerate() {
            let p = i / 2;
            for l in 1..walls.len() {
                let y = survivors[l];
                let block = k.cumulative(x, y).unwrap() - if p < l { 1.0 } else { 0.0 };
                assert!((m.get(i, 2 * l) - block).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn flank_subtraction_preserves_determinant() {
        let k = DiscreteKernel::ct_simple_walk(1.5).unwrap();
        let pat = WallParticlePattern::new(vec![-1.5, 0.5, 2.5], vec![-3, -1, 1, 4]).unwrap();
        let m = wall_particle_matrix(&k, &pat).unwrap();
        let mut reduced = m.clone();
        for w in 0..3 {
            reduced.subtract_row(2 * w + 1, 2 * w);
        }
        let (d0, d1) = (m.determinant().unwrap(), reduced.determinant().unwrap());
        assert!((d0 - d1).abs() < 1e-14, "{d0} vs {d1}");
    }

    #[test]
    fn adjacent_walls_are_rejected() {
        let k = DiscreteKernel::ct_simple_walk(1.0).unwrap();
        let pat = WallParticlePattern::new(vec![0.5, 1.5], vec![0, 1, 2]).unwrap();
        assert!(wall_particle_matrix(&k, &pat).is_err());
        let pat = WallParticlePattern::new(vec![0.0], vec![0, 1]).unwrap();
        assert!(wall_particle_matrix(&k, &pat).is_err());
    }

    #[test]
    fn multi_pattern_columns() {
        let k = DiscreteKernel::ct_simple_walk(1.0).unwrap();
        let p1 = WallParticlePattern::new(vec![0.5, 2.5], vec![0, 2, 3]).unwrap();
        let p2 = WallParticlePattern::new(vec![6.5], vec![5, 8]).unwrap();
        let m = multi_pattern_matrix(&k, &[p1.clone(), p2.clone()]).unwrap();
        assert_eq!(m.order(), 6);
        // columns: P(y0) P(y1) F(y1) P(y2) P(y3) P(y4)
        let starts = [0, 1, 2, 3, 6, 7];
        let ys = [0, 2, 2, 3, 5, 8];
        for (i, &x) in starts.iter().enumerate() {
            for j in [0, 1, 3, 4, 5] {
                assert_eq!(m.get(i, j), k.point_prob(x, ys[j]).unwrap());
            }
        }
        let single = multi_pattern_matrix(&k, std::slice::from_ref(&p1)).unwrap();
        assert_eq!(single, wall_particle_matrix(&k, &p1).unwrap());
        assert!(multi_pattern_matrix(&k, &[p2, p1]).is_err());
    }

    #[test]
    fn brownian_k1_closed_form() {
        for &(x, y0, y1, t) in &[(0.0, -1.0, 1.0, 1.0), (0.3, -0.2, 2.0, 2.5), (-1.0, -3.0, 0.5, 0.4)] {
            let pat = WallParticlePattern::new(vec![x], vec![y0, y1]).unwrap();
            let det = brownian_m0(&pat, t).unwrap().determinant().unwrap();
            let k = ContinuousKernel::gaussian(t).unwrap();
            let expected = k.density(x, y0).unwrap() * k.density(x, y1).unwrap() * (y1 - y0) / t;
            assert!((det - expected).abs() < 1e-15 * expected.max(1.0), "{det} vs {expected}");
        }
    }

    #[test]
    fn brownian_k2_rescaled_entries() {
        let (u, v, g1, g2) = (0.4, 1.7, 1.0, 1.2);
        let pat = WallParticlePattern::new(vec![u, v], vec![0.0, g1, g1 + g2]).unwrap();
        let m = brownian_m0(&pat, 1.0).unwrap();
        // density row at u, survivor 0: φ(u); derivative row: (0-u)φ(u)
        assert!((m.get(0, 0) - normal_pdf(u)).abs() < 1e-16);
        assert!((m.get(1, 0) - (-u * normal_pdf(u))).abs() < 1e-16);
        assert!((m.get(1, 2) + normal_pdf(g1 - u)).abs() < 1e-16);
        assert!((m.get(3, 2) + normal_pdf(g1 - v)).abs() < 1e-16);
    }

    #[test]
    fn grid_refinement_converges_to_m0() {
        let k = ContinuousKernel::gaussian(1.0).unwrap();
        let pat = WallParticlePattern::new(vec![-0.3, 0.9], vec![-1.0, 0.2, 1.8]).unwrap();
        let eps = 1e-4;
        let fine = grid_wall_particle_matrix(&k, &pat, eps).unwrap().determinant().unwrap() / eps.powi(2);
        let m0 = brownian_m0(&pat, 1.0).unwrap().determinant().unwrap();
        assert!(((fine - m0) / m0).abs() < 1e-3, "{fine} vs {m0}");
    }

    #[test]
    fn halfline_k1_layout() {
        let pat = WallParticlePattern::new(vec![1.0], vec![0.5, 2.0]).unwrap();
        let m = halfline_m0(&pat, 1.0).unwrap();
        let k = ContinuousKernel::reflected_gaussian(1.0).unwrap();
        assert_eq!(m.order(), 3);
        assert!((m.get(0, 1) - (k.cdf(0.0, 0.5).unwrap() - 1.0)).abs() < 1e-15);
        assert_eq!(m.get(1, 1), k.cdf(1.0, 0.5).unwrap());
        assert_eq!(m.get(2, 1), k.d_source_cdf(1.0, 0.5).unwrap());
        assert_eq!(m.get(2, 2), k.d_source_density(1.0, 2.0).unwrap());
        assert!(halfline_m0(&WallParticlePattern::new(vec![-1.0], vec![0.5, 2.0]).unwrap(), 1.0).is_err());
    }

    #[test]
    fn warren_single_particle_and_infinite_thresholds() {
        let k = DiscreteKernel::ct_simple_walk(0.8).unwrap();
        let p = warren_cdf(&k, &[0], &[Threshold::Finite(1)]).unwrap();
        assert_eq!(p.value, k.cumulative(0, 1).unwrap());
        let p = warren_cdf(&k, &[0, 1, 4], &[Threshold::Infinite; 3]).unwrap();
        assert_eq!(p.value, 1.0);
        assert!(!p.clamped);
        assert!(warren_cdf(&k, &[0, 1], &[Threshold::Finite(2), Threshold::Finite(1)]).is_err());
        assert!(warren_cdf(&k, &[0, 1], &[Threshold::Infinite, Threshold::Finite(1)]).is_err());
    }

    #[test]
    fn clamp_policy() {
        assert_eq!(DetOutcome::nonnegative(-1e-13).unwrap(), DetOutcome { value: 0.0, raw: -1e-13, clamped: true });
        assert!(DetOutcome::nonnegative(-1e-11).is_err());
        let p = DetOutcome::probability(1.0 + 1e-13);
        assert_eq!(p.value, 1.0);
        assert!(!p.clamped);
        assert!(DetOutcome::probability(1.1).clamped);
    }
}
