//! Coalescence determinants for skip-free coalescing particle systems.

pub mod detcore;
pub mod error;
pub mod gaps;
pub mod kernels;
pub mod quad;
pub mod sim;
pub mod validation;

pub use error::{Error, ErrorClass, Result};
