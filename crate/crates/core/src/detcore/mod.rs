//! Coalescence-type matrices and their determinants.
//!
//! Every builder goes through the row-level staircase of
//! [`coalescence_matrix`]; wall-particle, multi-pattern, Brownian `M₀` and
//! half-line matrices are particular start/row/pattern choices.

mod builders;
mod matrix;
mod pattern;

pub use builders::{
    brownian_intensity, brownian_m0, coalescence_matrix, coalescence_probability, finite_thresholds, flanking_sites,
    grid_wall_particle_matrix, halfline_intensity, halfline_m0, multi_pattern_matrix, multi_pattern_probability,
    refined_matrix, wall_particle_matrix, wall_particle_probability, warren_cdf, warren_matrix, DetOutcome,
    RefinedRow, Threshold, CLAMP_TOLERANCE,
};
pub use matrix::{determinant, SquareMatrix};
pub use pattern::{CoalescencePattern, ColumnRole, WallParticlePattern};
