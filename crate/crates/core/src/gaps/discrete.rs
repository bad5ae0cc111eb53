use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::DiscreteKernel;

/// `R(m) = Σ_s P_T(s) P_T(s + m)` over the tabulated displacement support.
pub fn autocorrelation(kernel: &DiscreteKernel, m: i64) -> f64 {
    let (lo, hi) = kernel.support();
    let from = lo.max(lo - m);
    let to = hi.min(hi - m);
    (from..=to).map(|s| kernel.displacement_prob(s) * kernel.displacement_prob(s + m)).sum()
}

/// Survivor gap law of a lattice walk started from every occupied site.
///
/// Gaps are multiples of the lattice step `d` (1 for the continuous-time
/// walk, 2 for the parity walk); `μ({g})` is the expected number of
/// survivor pairs at distance `g` per wall.
#[derive(Debug, Clone)]
pub struct DiscreteGapLaw {
    kernel: DiscreteKernel,
    doubled: DiscreteKernel,
    step: i64,
    total: f64,
    max_gap: i64,
}

/// Tabulated discrete gap intensities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapIntensity {
    /// `(g, μ({g}))` for every lattice gap up to the table bound.
    pub values: Vec<(i64, f64)>,
    /// Total intensity used to normalize.
    pub total_intensity: f64,
}

impl GapIntensity {
    pub fn pmf(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().map(move |&(g, mu)| (g, mu / self.total_intensity))
    }
}

impl DiscreteGapLaw {
    pub fn new(kernel: &DiscreteKernel) -> Self {
        let step = kernel.lattice_step();
        let doubled = kernel.doubled();
        let (lo, hi) = kernel.support();
        let max_gap = 2 * (hi - lo) + 2 * step;
        let mut law = Self { kernel: kernel.clone(), doubled, step, total: 0.0, max_gap };
        law.total = if kernel.is_symmetric() {
            law.doubled.displacement_prob(0) + law.doubled.displacement_prob(step)
        } else {
            (1..=max_gap / step).map(|i| law.r_form(i * step)).sum()
        };
        law
    }

    pub fn kernel(&self) -> &DiscreteKernel {
        &self.kernel
    }

    pub fn lattice_step(&self) -> i64 {
        self.step
    }

    /// Gaps beyond this carry no tabulated mass.
    pub fn max_gap(&self) -> i64 {
        self.max_gap
    }

    fn check(&self, g: i64) -> Result<()> {
        if g < 1 {
            return Err(Error::InvalidInput(format!("gap must be at least 1, got {g}")));
        }
        Ok(())
    }

    fn r_form(&self, g: i64) -> f64 {
        autocorrelation(&self.kernel, g - self.step) - autocorrelation(&self.kernel, g + self.step)
    }

    fn p2t_form(&self, g: i64) -> f64 {
        self.doubled.displacement_prob(g - self.step) - self.doubled.displacement_prob(g + self.step)
    }

    /// `R(g - d) - R(g + d)`, valid for any translation-invariant walk.
    pub fn intensity_autocorrelation_form(&self, g: i64) -> Result<f64> {
        self.check(g)?;
        Ok(if g % self.step != 0 { 0.0 } else { self.r_form(g) })
    }

    /// `P_{2T}(g - d) - P_{2T}(g + d)`, valid for symmetric walks.
    pub fn intensity_doubled_form(&self, g: i64) -> Result<f64> {
        self.check(g)?;
        if !self.kernel.is_symmetric() {
            return Err(Error::InvalidInput("the doubled-horizon form needs a symmetric walk".into()));
        }
        Ok(if g % self.step != 0 { 0.0 } else { self.p2t_form(g) })
    }

    /// `μ({g})`.
    pub fn intensity(&self, g: i64) -> Result<f64> {
        if self.kernel.is_symmetric() {
            self.intensity_doubled_form(g)
        } else {
            self.intensity_autocorrelation_form(g)
        }
    }

    /// `Σ_g μ({g})`; the telescoped `P_{2T}(0) + P_{2T}(d)` for symmetric
    /// walks, a direct sum otherwise.
    pub fn total_intensity(&self) -> f64 {
        self.total
    }

    /// `Σ_{g <= n} μ({g})` in telescoped form (symmetric walks).
    pub fn telescoped_partial_sum(&self, n: i64) -> Result<f64> {
        if !self.kernel.is_symmetric() {
            return Err(Error::InvalidInput("telescoping needs a symmetric walk".into()));
        }
        let last = (n / self.step) * self.step;
        let p = |m: i64| self.doubled.displacement_prob(m);
        Ok(p(0) + p(self.step) - p(last) - p(last + self.step))
    }

    /// `P(G = g) = μ({g}) / Σ μ`.
    pub fn pmf(&self, g: i64) -> Result<f64> {
        Ok(self.intensity(g)? / self.total)
    }

    /// Survivors per site.
    pub fn survivor_density_per_site(&self) -> f64 {
        self.total / self.step as f64
    }

    /// Table of `μ({g})` for `g = d, 2d, …` up to `gmax`.
    pub fn tabulate(&self, gmax: i64) -> Result<GapIntensity> {
        let mut values = Vec::new();
        let mut g = self.step;
        while g <= gmax {
            values.push((g, self.intensity(g)?));
            g += self.step;
        }
        Ok(GapIntensity { values, total_intensity: self.total })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::bessel::scaled_bessel_i_table;

    #[test]
    fn autocorrelation_is_doubled_kernel() {
        for &t in &[0.25, 1.0, 3.0] {
            let k = DiscreteKernel::ct_simple_walk(t).unwrap();
            let k2 = k.doubled();
            for m in -4..=4 {
                assert!((autocorrelation(&k, m) - k2.displacement_prob(m)).abs() < 1e-10);
                assert!((autocorrelation(&k, m) - autocorrelation(&k, -m)).abs() < 1e-16);
            }
            assert!(autocorrelation(&k, 0) > 0.0);
        }
    }

    #[test]
    fn autocorrelation_brute_force() {
        let k = DiscreteKernel::ct_simple_walk(0.25).unwrap();
        let brute: f64 = (-60i64..=60).map(|s| k.displacement_prob(s) * k.displacement_prob(s + 1)).sum();
        assert!((autocorrelation(&k, 1) - brute).abs() < 1e-12);
    }

    #[test]
    fn bessel_value_at_gap_two() {
        let law = DiscreteGapLaw::new(&DiscreteKernel::ct_simple_walk(1.0).unwrap());
        let i = scaled_bessel_i_table(4.0, 3);
        // e^{-4}(I_1(4) - I_3(4)) with I scaled by e^{-4}
        assert!((law.intensity(2).unwrap() - (i[1] - i[3])).abs() < 1e-12);
    }

    #[test]
    fn forms_agree_for_symmetric_walks() {
        for k in [DiscreteKernel::ct_simple_walk(2.0).unwrap(), DiscreteKernel::parity_walk(6, 0).unwrap()] {
            let law = DiscreteGapLaw::new(&k);
            for g in 1..30 {
                let a = law.intensity_autocorrelation_form(g).unwrap();
                let b = law.intensity_doubled_form(g).unwrap();
                assert!((a - b).abs() < 1e-12, "g={g}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn telescoping_and_normalization() {
        let law = DiscreteGapLaw::new(&DiscreteKernel::ct_simple_walk(1.0).unwrap());
        let mut acc = 0.0;
        for n in 1..=law.max_gap() {
            acc += law.intensity(n).unwrap();
            assert!((acc - law.telescoped_partial_sum(n).unwrap()).abs() < 1e-12);
        }
        assert!((acc - law.total_intensity()).abs() < 1e-12);
        let pmf: f64 = (1..=law.max_gap()).map(|g| law.pmf(g).unwrap()).sum();
        assert!((pmf - 1.0).abs() < 1e-12);
        assert!(law.intensity(0).is_err());
    }

    #[test]
    fn tail_decays_past_the_mode() {
        let law = DiscreteGapLaw::new(&DiscreteKernel::ct_simple_walk(4.0).unwrap());
        let mu: Vec<f64> = (1..60).map(|g| law.intensity(g).unwrap()).collect();
        let mode = mu.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!(mu[mode..].windows(2).all(|w| w[1] <= w[0]));
        assert!(mu.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn parity_walk_gaps_are_even() {
        let law = DiscreteGapLaw::new(&DiscreteKernel::parity_walk(5, 0).unwrap());
        for g in 1..20 {
            let mu = law.intensity(g).unwrap();
            if g % 2 == 1 {
                assert_eq!(mu, 0.0);
            } else {
                assert!(mu >= 0.0);
            }
        }
        let total: f64 = (1..=law.max_gap()).map(|g| law.intensity(g).unwrap()).sum();
        assert!((total - law.total_intensity()).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_walk_uses_autocorrelation_form() {
        let k = DiscreteKernel::ct_walk(1.4, 0.6, 1.5).unwrap();
        let law = DiscreteGapLaw::new(&k);
        assert!(law.intensity_doubled_form(2).is_err());
        let mu: Vec<f64> = (1..=law.max_gap()).map(|g| law.intensity(g).unwrap()).collect();
        assert!(mu.iter().all(|&m| m >= -1e-15));
        // X' - X for independent copies is a symmetric walk with the total
        // rate in each direction, so the gap law loses the drift
        let sym = DiscreteGapLaw::new(&DiscreteKernel::ct_walk(1.0, 1.0, 1.5).unwrap());
        for g in 1..40 {
            assert!((law.intensity(g).unwrap() - sym.intensity(g).unwrap()).abs() < 1e-12);
        }
        assert!((law.total_intensity() - sym.total_intensity()).abs() < 1e-12);
    }
}
