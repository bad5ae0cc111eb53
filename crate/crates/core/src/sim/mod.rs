//! Monte Carlo simulation of coalescing walkers under the maximal entrance
//! law on a finite window, with an exact oracle for small parity-walk
//! systems.
//!
//! Replicate `r` draws from ChaCha8 stream `r` of the master seed, so
//! results do not depend on thread count or scheduling.

mod config;
mod engine;
mod estimators;
mod oracle;
mod run;

pub use config::{InitialOccupancy, Model, SimulationConfig};
pub use engine::{evolve, Cluster, Dynamics};
pub use estimators::{
    compare_wall_and_survivor_gaps, empirical_event_frequency, empirical_gap_histogram, empirical_joint_gap_corr,
    empirical_wall_gaps, empirical_warren_cdf, random_sublattice_starts, survivor_density, FiniteModel,
    GapHistogram, HistogramBin, HistogramComparison, McEstimate,
};
pub use oracle::{dp_oracle, DpQuery, ParityOracle, MAX_PARTICLES, MAX_STATES, MAX_STEPS};
pub use run::{run_replicates, simulate, simulate_replicate, PairSums, ReplicateSummary, SurvivorConfiguration};
