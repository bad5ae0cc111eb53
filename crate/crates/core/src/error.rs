use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative time horizon {0}")]
    NegativeTime(f64),

    #[error("site {site} is off the occupied sublattice (parity {parity})")]
    OffSublattice { site: i64, parity: i64 },

    #[error("site {to} is not reachable from {from} in {steps} steps (parity mismatch)")]
    ParityViolation { from: i64, to: i64, steps: u64 },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("determinant {value:e} is negative beyond rounding tolerance")]
    NegativeDeterminant { value: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("state space too large: {0}")]
    StateSpace(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Coarse classification used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonConvergence(_)
            | Error::NegativeDeterminant { .. }
            | Error::NonFiniteEntry { .. }
            | Error::StateSpace(_) => ErrorClass::Numeric,
            _ => ErrorClass::Config,
        }
    }
}
