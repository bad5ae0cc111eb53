use serde::{Deserialize, Serialize};

use super::bessel::scaled_bessel_i_table;
use super::TAIL_CUTOFF;
use crate::error::{Error, Result};

/// Lattice walks with a translation-invariant law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DiscreteFamily {
    /// Continuous-time nearest-neighbour walk: jumps `+1` at `right_rate`
    /// and `-1` at `left_rate`. The simple walk has both rates equal to 1.
    CtWalk { right_rate: f64, left_rate: f64 },
    /// Discrete-time `±1` walk occupying the sublattice `x ≡ parity (mod 2)`.
    ParityWalk { parity: i64 },
}

/// Transition law of a lattice walk at a fixed horizon.
///
/// The displacement law is tabulated once at construction; lookups are
/// table reads. The table is truncated where the remaining mass drops
/// below [`TAIL_CUTOFF`].
#[derive(Debug, Clone)]
pub struct DiscreteKernel {
    family: DiscreteFamily,
    horizon: f64,
    table: DisplacementTable,
}

#[derive(Debug, Clone)]
struct DisplacementTable {
    /// displacement of `pmf[0]`
    offset: i64,
    pmf: Vec<f64>,
    /// `below[i] = sum_{j <= i} pmf[j]`, accumulated from the far left
    below: Vec<f64>,
    /// `above[i] = sum_{j >= i} pmf[j]`, accumulated from the far right
    above: Vec<f64>,
}

impl DisplacementTable {
    fn new(offset: i64, pmf: Vec<f64>) -> Self {
        let mut pmf = pmf;
        // trim both ends where the accumulated mass is negligible
        let mut acc = 0.0;
        let mut lo = 0;
        while lo < pmf.len() && acc + pmf[lo] < TAIL_CUTOFF {
            acc += pmf[lo];
            lo += 1;
        }
        acc = 0.0;
        let mut hi = pmf.len();
        while hi > lo + 1 && acc + pmf[hi - 1] < TAIL_CUTOFF {
            acc += pmf[hi - 1];
            hi -= 1;
        }
        pmf.truncate(hi);
        let pmf: Vec<f64> = pmf.split_off(lo);
        let offset = offset + lo as i64;

        let mut below = Vec::with_capacity(pmf.len());
        let mut running = 0.0;
        for &p in &pmf {
            running += p;
            below.push(running);
        }
        let mut above = vec![0.0; pmf.len()];
        running = 0.0;
        for (i, &p) in pmf.iter().enumerate().rev() {
            running += p;
            above[i] = running;
        }
        Self { offset, pmf, below, above }
    }

    fn index(&self, n: i64) -> i64 {
        n - self.offset
    }

    fn pmf(&self, n: i64) -> f64 {
        let i = self.index(n);
        if i < 0 || i as usize >= self.pmf.len() {
            0.0
        } else {
            self.pmf[i as usize]
        }
    }

    /// `sum_{m <= n} pmf(m)`
    fn cdf(&self, n: i64) -> f64 {
        let i = self.index(n);
        if i < 0 {
            return 0.0;
        }
        let i = i as usize;
        if i + 1 >= self.pmf.len() {
            return 1.0;
        }
        if self.below[i] <= 0.5 {
            self.below[i]
        } else {
            1.0 - self.above[i + 1]
        }
    }

    /// `sum_{m > n} pmf(m)`
    fn survival(&self, n: i64) -> f64 {
        let i = self.index(n);
        if i < 0 {
            return 1.0;
        }
        let i = i as usize;
        if i + 1 >= self.pmf.len() {
            return 0.0;
        }
        if self.above[i + 1] <= 0.5 {
            self.above[i + 1]
        } else {
            1.0 - self.below[i]
        }
    }

    fn range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.pmf.len() as i64 - 1)
    }
}

impl DiscreteKernel {
    /// Continuous-time simple random walk, `P_t(n) = e^{-2t} I_n(2t)`.
    pub fn ct_simple_walk(horizon: f64) -> Result<Self> {
        Self::ct_walk(1.0, 1.0, horizon)
    }

    /// Continuous-time walk with separate right/left jump rates.
    ///
    /// `P_t(n) = e^{-(r+l)t} (r/l)^{n/2} I_{|n|}(2t sqrt(rl))`.
    pub fn ct_walk(right_rate: f64, left_rate: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !(right_rate > 0.0 && left_rate > 0.0 && right_rate.is_finite() && left_rate.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "jump rates must be positive and finite, got ({right_rate}, {left_rate})"
            )));
        }
        let family = DiscreteFamily::CtWalk { right_rate, left_rate };
        let x = 2.0 * horizon * (right_rate * left_rate).sqrt();
        let drift = (right_rate - left_rate) * horizon;
        let variance = (right_rate + left_rate) * horizon;
        let reach = drift.abs() + 16.0 * variance.sqrt() + 40.0;
        let n_max = reach.ceil() as usize;
        let bessel = scaled_bessel_i_table(x, n_max);
        let log_prefactor = -(right_rate + left_rate) * horizon + x;
        let half_log_ratio = 0.5 * (right_rate / left_rate).ln();
        let pmf: Vec<f64> = (-(n_max as i64)..=n_max as i64)
            .map(|n| {
                let b = bessel[n.unsigned_abs() as usize];
                if b == 0.0 {
                    0.0
                } else {
                    b * (log_prefactor + n as f64 * half_log_ratio).exp()
                }
            })
            .collect();
        Ok(Self { family, horizon, table: DisplacementTable::new(-(n_max as i64), pmf) })
    }

    /// Discrete-time `±1` walk after `steps` steps on the sublattice of the
    /// given parity.
    pub fn parity_walk(steps: u64, parity: i64) -> Result<Self> {
        let family = DiscreteFamily::ParityWalk { parity: parity.rem_euclid(2) };
        let s = steps as i64;
        let pmf: Vec<f64> = (-s..=s)
            .map(|n| if (n + s) % 2 == 0 { binomial_half(steps, ((n + s) / 2) as u64) } else { 0.0 })
            .collect();
        Ok(Self { family, horizon: steps as f64, table: DisplacementTable::new(-s, pmf) })
    }

    /// Same family at a different horizon. Parity walks round the horizon to
    /// whole steps and reject non-integral values.
    pub fn at_horizon(&self, horizon: f64) -> Result<Self> {
        match self.family {
            DiscreteFamily::CtWalk { right_rate, left_rate } => Self::ct_walk(right_rate, left_rate, horizon),
            DiscreteFamily::ParityWalk { parity } => {
                check_horizon(horizon)?;
                if horizon.fract() != 0.0 {
                    return Err(Error::InvalidInput(format!("parity walk needs integral steps, got {horizon}")));
                }
                Self::parity_walk(horizon as u64, parity)
            }
        }
    }

    /// Kernel at twice the horizon (used by the Chapman–Kolmogorov forms).
    pub fn doubled(&self) -> Self {
        self.at_horizon(2.0 * self.horizon).expect("doubling a valid horizon stays valid")
    }

    pub fn family(&self) -> DiscreteFamily {
        self.family
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Spacing between neighbouring initially occupied sites.
    pub fn lattice_step(&self) -> i64 {
        match self.family {
            DiscreteFamily::CtWalk { .. } => 1,
            DiscreteFamily::ParityWalk { .. } => 2,
        }
    }

    /// Displacement variance per unit of horizon.
    pub fn variance_rate(&self) -> f64 {
        match self.family {
            DiscreteFamily::CtWalk { right_rate, left_rate } => right_rate + left_rate,
            DiscreteFamily::ParityWalk { .. } => 1.0,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self.family {
            DiscreteFamily::CtWalk { right_rate, left_rate } => right_rate == left_rate,
            DiscreteFamily::ParityWalk { .. } => true,
        }
    }

    /// Smallest and largest displacement carried by the table.
    pub fn support(&self) -> (i64, i64) {
        self.table.range()
    }

    /// `P_T(0, n)` without any lattice checks; zero off the reachable set.
    pub fn displacement_prob(&self, n: i64) -> f64 {
        self.table.pmf(n)
    }

    /// `P_T(x, y)`.
    pub fn point_prob(&self, x: i64, y: i64) -> Result<f64> {
        self.check_source(x)?;
        self.check_target(x, y)?;
        Ok(self.table.pmf(y - x))
    }

    /// `F_T(x, y) = sum_{z <= y} P_T(x, z)`.
    ///
    /// The threshold `y` may be any integer: the sum is well defined even
    /// off the reachable sublattice.
    pub fn cumulative(&self, x: i64, y: i64) -> Result<f64> {
        self.check_source(x)?;
        Ok(self.table.cdf(y - x))
    }

    /// `1 - F_T(x, y)`, accumulated directly from the right tail.
    pub fn survival(&self, x: i64, y: i64) -> Result<f64> {
        self.check_source(x)?;
        Ok(self.table.survival(y - x))
    }

    /// Whether `y` can be occupied at the horizon by a walker from `x`.
    pub fn admissible(&self, x: i64, y: i64) -> bool {
        self.check_source(x).is_ok() && self.check_target(x, y).is_ok()
    }

    pub fn is_occupied_site(&self, x: i64) -> bool {
        self.check_source(x).is_ok()
    }

    fn check_source(&self, x: i64) -> Result<()> {
        match self.family {
            DiscreteFamily::ParityWalk { parity } if x.rem_euclid(2) != parity => {
                Err(Error::OffSublattice { site: x, parity })
            }
            _ => Ok(()),
        }
    }

    fn check_target(&self, x: i64, y: i64) -> Result<()> {
        match self.family {
            DiscreteFamily::ParityWalk { .. } => {
                let steps = self.horizon as u64;
                if (y - x - steps as i64).rem_euclid(2) != 0 {
                    Err(Error::ParityViolation { from: x, to: y, steps })
                } else {
                    Ok(())
                }
            }
            DiscreteFamily::CtWalk { .. } => Ok(()),
        }
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon < 0.0 {
        return Err(Error::NegativeTime(horizon));
    }
    if !horizon.is_finite() {
        return Err(Error::InvalidInput(format!("horizon must be finite, got {horizon}")));
    }
    Ok(())
}

/// `C(n, k) / 2^n`. Exact integer arithmetic while the coefficient fits in
/// 53 bits, log-gamma plus a ratio walk beyond.
fn binomial_half(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 50 {
        let k = k.min(n - k);
        let mut c: u64 = 1;
        for i in 0..k {
            c = c * (n - i) / (i + 1);
        }
        return c as f64 * 0.5f64.powi(n as i32);
    }
    let ln = libm::lgamma(n as f64 + 1.0)
        - libm::lgamma(k as f64 + 1.0)
        - libm::lgamma((n - k) as f64 + 1.0)
        - n as f64 * std::f64::consts::LN_2;
    ln.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_identity() {
        let k = DiscreteKernel::ct_simple_walk(0.0).unwrap();
        assert_eq!(k.point_prob(0, 0).unwrap(), 1.0);
        assert_eq!(k.point_prob(0, 3).unwrap(), 0.0);
        assert_eq!(k.cumulative(0, -1).unwrap(), 0.0);
        assert_eq!(k.cumulative(0, 0).unwrap(), 1.0);
    }

    #[test]
    fn negative_time_rejected() {
        assert_eq!(DiscreteKernel::ct_simple_walk(-0.5).unwrap_err(), Error::NegativeTime(-0.5));
    }

    #[test]
    fn parity_walk_two_steps() {
        let k = DiscreteKernel::parity_walk(2, 0).unwrap();
        assert_eq!(k.point_prob(0, 0).unwrap(), 0.5);
        assert_eq!(k.point_prob(0, 2).unwrap(), 0.25);
        assert_eq!(k.point_prob(0, -2).unwrap(), 0.25);
        assert!(matches!(k.point_prob(0, 1), Err(Error::ParityViolation { .. })));
        assert!(matches!(k.point_prob(1, 1), Err(Error::OffSublattice { .. })));
        assert_eq!(k.cumulative(0, 1).unwrap(), 0.75);
    }

    #[test]
    fn large_parity_walk_is_normalised() {
        let k = DiscreteKernel::parity_walk(501, 0).unwrap();
        let (lo, hi) = k.support();
        let total: f64 = (lo..=hi).map(|n| k.displacement_prob(n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((k.displacement_prob(1) - k.displacement_prob(-1)).abs() < 1e-15);
    }

    #[test]
    fn survival_complements_cumulative() {
        let k = DiscreteKernel::ct_simple_walk(3.0).unwrap();
        for y in -20..20 {
            let f = k.cumulative(0, y).unwrap();
            let s = k.survival(0, y).unwrap();
            assert!((f + s - 1.0).abs() < 1e-15);
        }
        // deep right tail keeps relative precision
        let s = k.survival(0, 20).unwrap();
        assert!((s - 8.782_547_634_310_683e-13).abs() < TAIL_CUTOFF, "{s:e}");
    }

    #[test]
    fn asymmetric_walk_has_expected_mean() {
        let k = DiscreteKernel::ct_walk(1.5, 0.5, 2.0).unwrap();
        let (lo, hi) = k.support();
        let total: f64 = (lo..=hi).map(|n| k.displacement_prob(n)).sum();
        let mean: f64 = (lo..=hi).map(|n| n as f64 * k.displacement_prob(n)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((mean - 2.0).abs() < 1e-10);
        assert!(!k.is_symmetric());
    }
}
