use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detcore::{brownian_m0, SquareMatrix, WallParticlePattern};
use crate::error::{Error, Result};
use crate::kernels::{normal_cdf, normal_pdf};
use crate::quad::{integrate_1d, integrate_ordered_vec, DecayHint, Estimate, QuadratureSpec};

/// `μ(dG)/dG = G/(2√π) e^{-G²/4}` in rescaled units (horizon 1).
pub fn rayleigh_gap_density(g: f64) -> Result<f64> {
    check_gap(g)?;
    Ok(g / (2.0 * PI.sqrt()) * (-g * g / 4.0).exp())
}

/// Normalized gap density `(G/2) e^{-G²/4}`: Rayleigh with scale `√2`.
pub fn rayleigh_pdf(g: f64) -> Result<f64> {
    check_gap(g)?;
    Ok(0.5 * g * (-g * g / 4.0).exp())
}

/// `∫ μ(dG) = 1/√π`.
pub fn rayleigh_total() -> f64 {
    1.0 / PI.sqrt()
}

/// Mean of the normalized gap law, `√π`.
pub fn rayleigh_mean() -> f64 {
    PI.sqrt()
}

/// Variance of the normalized gap law, `4 - π`.
pub fn rayleigh_variance() -> f64 {
    4.0 - PI
}

/// Survivors per unit length at horizon `t`: `1/√(πt)`.
pub fn survivor_density(t: f64) -> Result<f64> {
    check_horizon(t)?;
    Ok(1.0 / (PI * t).sqrt())
}

/// Gap intensity at horizon `t` in original units,
/// `G/(2√π t^{3/2}) e^{-G²/(4t)}`.
pub fn gap_intensity_at(g: f64, t: f64) -> Result<f64> {
    check_gap(g)?;
    check_horizon(t)?;
    Ok(g / (2.0 * PI.sqrt() * t.powf(1.5)) * (-g * g / (4.0 * t)).exp())
}

fn check_gap(g: f64) -> Result<()> {
    if !(g >= 0.0 && g.is_finite()) {
        return Err(Error::Domain(format!("gap must be a nonnegative finite number, got {g}")));
    }
    Ok(())
}

fn check_horizon(t: f64) -> Result<()> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("horizon must be positive and finite, got {t}")));
    }
    Ok(())
}

fn raw_det(walls: &[f64], survivors: &[f64], t: f64) -> Result<f64> {
    let pattern = WallParticlePattern::new(walls.to_vec(), survivors.to_vec())?;
    brownian_m0(&pattern, t)?.determinant()
}

/// Collects the first error raised inside a quadrature integrand.
struct FirstError(std::cell::RefCell<Option<Error>>);

impl FirstError {
    fn new() -> Self {
        Self(std::cell::RefCell::new(None))
    }

    fn value(&self, r: Result<f64>) -> f64 {
        r.unwrap_or_else(|e| {
            self.0.borrow_mut().get_or_insert(e);
            0.0
        })
    }

    fn values(&self, r: Result<Vec<f64>>, dim: usize) -> Vec<f64> {
        r.unwrap_or_else(|e| {
            self.0.borrow_mut().get_or_insert(e);
            vec![0.0; dim]
        })
    }

    fn finish<T>(self, r: Result<T>) -> Result<T> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

/// `∫ det M₀(u; 0, G) du` at horizon `t`: the single-gap intensity by
/// quadrature over the wall position.
pub fn single_gap_intensity(g: f64, t: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_gap(g)?;
    check_horizon(t)?;
    if g == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let errors = FirstError::new();
    let r = integrate_1d(
        |u| errors.value(raw_det(&[u], &[0.0, g], t)),
        f64::NEG_INFINITY,
        f64::INFINITY,
        Some(DecayHint::new(0.5 * g, t.sqrt())),
        spec,
    );
    errors.finish(r)
}

/// `h(G_1, …, G_k)`: the ordered `k`-fold integral of `det M₀` over the
/// wall positions, survivors at `0, G_1, G_1 + G_2, …`, horizon 1.
pub fn joint_gap_intensity_k(gaps: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    let k = gaps.len();
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("joint gap intensities are supported for 1 to 3 gaps, got {k}")));
    }
    let mut survivors = vec![0.0];
    for &g in gaps {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Domain(format!("gaps must be positive, got {gaps:?}")));
        }
        survivors.push(survivors.last().unwrap() + g);
    }
    let r = spec.truncation_radius_sigma;
    let (lo, hi) = (-r, survivors[k] + r);
    let errors = FirstError::new();
    let res = integrate_ordered_vec(
        |walls| {
            // coincident walls give equal rows
            if walls.windows(2).any(|w| w[0] >= w[1]) {
                return vec![0.0];
            }
            vec![errors.value(raw_det(walls, &survivors, 1.0))]
        },
        1,
        k,
        lo,
        hi,
        spec,
    );
    errors.finish(res).map(|v| v.component(0))
}

/// `h(G_1, G_2) = ∬_{u<v} det M₀(u, v; 0, G_1, G_1 + G_2) du dv`.
pub fn joint_gap_intensity(g1: f64, g2: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    joint_gap_intensity_k(&[g1, g2], spec)
}

/// `(∫_0^∞ y^b φ(y - x) dy, ∂ₓ of it)` for `b ≤ 2`.
fn right_moment(b: u32, x: f64) -> (f64, f64) {
    let (cdf, pdf) = (normal_cdf(x), normal_pdf(x));
    match b {
        0 => (cdf, pdf),
        1 => (x * cdf + pdf, cdf),
        2 => ((x * x + 1.0) * cdf + x * pdf, 2.0 * x * cdf + 2.0 * pdf),
        _ => unreachable!("moments above 2 are not used"),
    }
}

/// `(∫_{-∞}^0 (-y)^a φ(y - x) dy, ∂ₓ of it)`.
fn left_moment(a: u32, x: f64) -> (f64, f64) {
    let (v, d) = right_moment(a, -x);
    (v, -d)
}

/// Replaces column `col` of a two-wall `M₀` (rows: value/derivative at `u`,
/// then at `v`) by the given row entries.
fn with_column(m: &SquareMatrix, col: usize, entries: [f64; 4]) -> SquareMatrix {
    let mut out = m.clone();
    for (i, e) in entries.into_iter().enumerate() {
        out.set(i, col, e);
    }
    out
}

fn moment_column(f: fn(u32, f64) -> (f64, f64), power: u32, u: f64, v: f64) -> [f64; 4] {
    let (a, da) = f(power, u);
    let (b, db) = f(power, v);
    [a, da, b, db]
}

/// `∫_0^∞ h(G_1, G_2) dG_2`.
///
/// `det M₀` is linear in the column of the last survivor, so the `G_2`
/// integral moves into that column, leaving a two-dimensional integral.
pub fn joint_marginal(g1: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(g1 > 0.0 && g1.is_finite()) {
        return Err(Error::Domain(format!("gap must be positive, got {g1}")));
    }
    let r = spec.truncation_radius_sigma * std::f64::consts::SQRT_2;
    let errors = FirstError::new();
    let tail = |x: f64| (normal_cdf(x - g1), normal_pdf(g1 - x));
    let res = integrate_ordered_vec(
        |w| {
            let (u, v) = (w[0], w[1]);
            if u >= v {
                return vec![0.0];
            }
            let det = (|| {
                let pattern = WallParticlePattern::new(vec![u, v], vec![0.0, g1, g1 + 1.0])?;
                let m = brownian_m0(&pattern, 1.0)?;
                let (a, da) = tail(u);
                let (b, db) = tail(v);
                with_column(&m, 3, [a, da, b, db]).determinant()
            })();
            vec![errors.value(det)]
        },
        1,
        2,
        -r,
        g1 + r,
        spec,
    );
    errors.finish(res).map(|v| v.component(0))
}

/// Moments `∬ G_1^a G_2^b h(G_1, G_2)` for the orders listed in
/// [`MOMENT_ORDERS`].
pub fn joint_gap_moments(spec: &QuadratureSpec) -> Result<Vec<Estimate>> {
    let r = spec.truncation_radius_sigma * std::f64::consts::SQRT_2;
    let errors = FirstError::new();
    let dim = MOMENT_ORDERS.len();
    let res = integrate_ordered_vec(
        |w| {
            let (u, v) = (w[0], w[1]);
            if u >= v {
                return vec![0.0; dim];
            }
            let dets = (|| {
                // middle survivor at 0; the outer columns are replaced by
                // their integrals against the gap powers
                let pattern = WallParticlePattern::new(vec![u, v], vec![-1.0, 0.0, 1.0])?;
                let m = brownian_m0(&pattern, 1.0)?;
                MOMENT_ORDERS
                    .iter()
                    .map(|&(a, b)| {
                        let m = with_column(&m, 0, moment_column(left_moment, a, u, v));
                        with_column(&m, 3, moment_column(right_moment, b, u, v)).determinant()
                    })
                    .collect::<Result<Vec<f64>>>()
            })();
            errors.values(dets, dim)
        },
        dim,
        2,
        -r,
        r,
        spec,
    );
    let res = errors.finish(res)?;
    Ok((0..dim).map(|c| res.component(c)).collect())
}

/// `(a, b)` exponents of `G_1^a G_2^b` in [`joint_gap_moments`].
pub const MOMENT_ORDERS: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)];

/// Normalized moments of the consecutive-gap pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCorrelation {
    pub total: Estimate,
    pub means: [f64; 2],
    pub variances: [f64; 2],
    pub covariance: f64,
    pub rho: f64,
    /// First-order propagation of the moment quadrature errors.
    pub rho_error: f64,
}

fn correlation_from(m: &[f64]) -> (f64, [f64; 2], [f64; 2], f64) {
    let total = m[0];
    let means = [m[1] / total, m[2] / total];
    let variances = [m[3] / total - means[0] * means[0], m[4] / total - means[1] * means[1]];
    let covariance = m[5] / total - means[0] * means[1];
    (covariance / (variances[0] * variances[1]).sqrt(), means, variances, covariance)
}

/// Pearson correlation of adjacent gaps under the normalized joint density.
pub fn gap_correlation(spec: &QuadratureSpec) -> Result<GapCorrelation> {
    let moments = joint_gap_moments(spec)?;
    let values: Vec<f64> = moments.iter().map(|e| e.value).collect();
    let (rho, means, variances, covariance) = correlation_from(&values);
    let mut rho_error = 0.0;
    for (c, e) in moments.iter().enumerate() {
        let mut up = values.clone();
        up[c] += e.error;
        let mut down = values.clone();
        down[c] -= e.error;
        rho_error += 0.5 * (correlation_from(&up).0 - correlation_from(&down).0).abs();
    }
    Ok(GapCorrelation { total: moments[0], means, variances, covariance, rho, rho_error })
}

/// Joint intensity on a square mesh plus summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointGapResult {
    /// Mesh coordinates along each axis.
    pub grid: Vec<f64>,
    /// `h(grid[i], grid[j])` at index `i * grid.len() + j`.
    pub h_values: Vec<Estimate>,
    pub total: Estimate,
    pub correlation: GapCorrelation,
    /// `max |∫ h(G_1, ·) - μ(G_1)|` over the checked `G_1`.
    pub marginal_check: f64,
}

/// Marginal checkpoints used by [`joint_gap_mesh`].
pub const MARGINAL_CHECKPOINTS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// Mesh `G_i = gmax · i / rows`, `i = 1..=rows`.
pub fn mesh_axis(rows: usize, gmax: f64) -> Vec<f64> {
    (1..=rows).map(|i| gmax * i as f64 / rows as f64).collect()
}

/// `h` on a `rows x rows` mesh over `(0, gmax]²`, evaluated in parallel.
pub fn joint_gap_mesh(rows: usize, gmax: f64, spec: &QuadratureSpec) -> Result<JointGapResult> {
    if rows == 0 || !(gmax > 0.0) {
        return Err(Error::InvalidInput(format!("mesh needs rows > 0 and gmax > 0, got {rows}, {gmax}")));
    }
    let grid = mesh_axis(rows, gmax);
    let points: Vec<(f64, f64)> = grid.iter().flat_map(|&a| grid.iter().map(move |&b| (a, b))).collect();
    let h_values = points
        .par_iter()
        .map(|&(a, b)| joint_gap_intensity(a, b, spec))
        .collect::<Result<Vec<_>>>()?;
    let correlation = gap_correlation(spec)?;
    let mut marginal_check: f64 = 0.0;
    for g in MARGINAL_CHECKPOINTS {
        let m = joint_marginal(g, spec)?;
        marginal_check = marginal_check.max((m.value - rayleigh_gap_density(g)?).abs());
    }
    Ok(JointGapResult { grid, h_values, total: correlation.total, correlation, marginal_check })
}
