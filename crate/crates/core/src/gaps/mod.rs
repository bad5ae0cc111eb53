//! Gap laws of surviving particles.
//!
//! Lattice walks: exact intensities `μ({g})` from kernel autocorrelations.
//! Brownian motion (rescaled to horizon 1): the Rayleigh single-gap law and
//! the joint law of adjacent gaps by integrating `det M₀` over the walls.

mod brownian;
mod discrete;
mod scaling;

pub use brownian::{
    gap_correlation, gap_intensity_at, joint_gap_intensity, joint_gap_intensity_k, joint_gap_mesh,
    joint_gap_moments, joint_marginal, mesh_axis, rayleigh_gap_density, rayleigh_mean, rayleigh_pdf,
    rayleigh_total, rayleigh_variance, single_gap_intensity, survivor_density, GapCorrelation, JointGapResult,
    MARGINAL_CHECKPOINTS, MOMENT_ORDERS,
};
pub use discrete::{autocorrelation, DiscreteGapLaw, GapIntensity};
pub use scaling::{scaling_convergence_report, ScalingRow};
