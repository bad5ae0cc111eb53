use serde::{Deserialize, Serialize};

use super::brownian::rayleigh_pdf;
use super::discrete::DiscreteGapLaw;
use crate::error::{Error, Result};
use crate::kernels::DiscreteKernel;

/// Distance between a rescaled lattice gap law and the Rayleigh limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub horizon: f64,
    /// Gaps are divided by `sqrt(σ² T)`, `σ²` the walk's variance rate.
    pub scale: f64,
    /// `sup_g |scale · pmf(g) - f(g / scale)|`, `f` the normalized Rayleigh density.
    pub sup_distance: f64,
    /// `total intensity · sqrt(π σ² T)`; tends to 1.
    pub scaled_total: f64,
}

/// Compares the simple-walk gap pmf with its Brownian limit along an
/// increasing list of horizons.
pub fn scaling_convergence_report(horizons: &[f64]) -> Result<Vec<ScalingRow>> {
    if horizons.is_empty() || !horizons.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput(format!("horizons must be a nonempty increasing list: {horizons:?}")));
    }
    horizons
        .iter()
        .map(|&t| {
            let kernel = DiscreteKernel::ct_simple_walk(t)?;
            let law = DiscreteGapLaw::new(&kernel);
            let scale = (kernel.variance_rate() * t).sqrt();
            let mut sup: f64 = 0.0;
            for g in 1..=law.max_gap() {
                let d = (scale * law.pmf(g)? - rayleigh_pdf(g as f64 / scale)?).abs();
                sup = sup.max(d);
            }
            let scaled_total = law.total_intensity() * (std::f64::consts::PI * scale * scale).sqrt();
            Ok(ScalingRow { horizon: t, scale, sup_distance: sup, scaled_total })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances_shrink() {
        let rows = scaling_convergence_report(&[1.0, 16.0, 256.0]).unwrap();
        assert!(rows.windows(2).all(|w| w[1].sup_distance < w[0].sup_distance));
        assert!(rows[2].sup_distance < 0.01, "{rows:?}");
        assert!(rows.windows(2).all(|w| (w[1].scaled_total - 1.0).abs() < (w[0].scaled_total - 1.0).abs()));
        assert!(scaling_convergence_report(&[4.0, 1.0]).is_err());
    }
}
