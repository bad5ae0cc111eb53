//! Transition laws at a fixed horizon.
//!
//! Discrete kernels ([`DiscreteKernel`]) live on integer sites and carry
//! point probabilities `P(x, y)` with cumulative sums `F(x, y)`.
//! Continuous kernels ([`ContinuousKernel`]) carry densities `p_x(y)`, CDFs
//! `F_x(y)` and the source derivatives `∂ₓp`, `∂ₓF` that appear in the
//! grid-refined determinants. Instances are immutable; a different horizon
//! means a new instance.

pub mod bessel;
mod continuous;
mod discrete;

use std::fmt::Debug;

pub use continuous::{normal_cdf, normal_interval, normal_pdf, ContinuousFamily, ContinuousKernel};
pub use discrete::{DiscreteFamily, DiscreteKernel};

use crate::error::Result;

/// Displacement tables are cut where the remaining mass falls below this.
pub const TAIL_CUTOFF: f64 = 1e-17;

/// Common face of discrete and continuous kernels, as seen by the matrix
/// builders.
pub trait TransitionKernel: Send + Sync {
    type Site: Copy + PartialOrd + Debug + Send + Sync;

    fn horizon(&self) -> f64;

    /// `P(x, y)` or `p_x(y)`.
    fn transition(&self, x: Self::Site, y: Self::Site) -> Result<f64>;

    /// `F(x, y)`.
    fn cumulative(&self, x: Self::Site, y: Self::Site) -> Result<f64>;

    /// `1 - F(x, y)`; used wherever a staircase entry `F - 1` is needed.
    fn survival(&self, x: Self::Site, y: Self::Site) -> Result<f64>;

    /// Whether a walker from `x` can sit at `y` at the horizon.
    fn reachable(&self, _x: Self::Site, _y: Self::Site) -> bool {
        true
    }

    fn is_discrete(&self) -> bool;
}

impl TransitionKernel for DiscreteKernel {
    type Site = i64;

    fn horizon(&self) -> f64 {
        DiscreteKernel::horizon(self)
    }

    fn transition(&self, x: i64, y: i64) -> Result<f64> {
        self.point_prob(x, y)
    }

    fn cumulative(&self, x: i64, y: i64) -> Result<f64> {
        DiscreteKernel::cumulative(self, x, y)
    }

    fn survival(&self, x: i64, y: i64) -> Result<f64> {
        DiscreteKernel::survival(self, x, y)
    }

    fn reachable(&self, x: i64, y: i64) -> bool {
        self.admissible(x, y)
    }

    fn is_discrete(&self) -> bool {
        true
    }
}

impl TransitionKernel for ContinuousKernel {
    type Site = f64;

    fn horizon(&self) -> f64 {
        ContinuousKernel::horizon(self)
    }

    fn transition(&self, x: f64, y: f64) -> Result<f64> {
        self.density(x, y)
    }

    fn cumulative(&self, x: f64, y: f64) -> Result<f64> {
        self.cdf(x, y)
    }

    fn survival(&self, x: f64, y: f64) -> Result<f64> {
        ContinuousKernel::survival(self, x, y)
    }

    fn is_discrete(&self) -> bool {
        false
    }
}
