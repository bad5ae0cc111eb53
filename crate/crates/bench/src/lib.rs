//! Benchmark fixtures shared by the criterion benches.

use coalesce_core::detcore::WallParticlePattern;
use coalesce_core::sim::{Model, SimulationConfig};

/// A `k`-wall Brownian pattern with unit spacing.
pub fn brownian_pattern(k: usize) -> WallParticlePattern<f64> {
    let walls = (0..k).map(|i| i as f64 + 0.5).collect();
    let survivors = (0..=k).map(|i| i as f64).collect();
    WallParticlePattern::new(walls, survivors).expect("fixture pattern is valid")
}

/// Single-replicate lattice run over `2 * halfwidth + 1` sites.
pub fn lattice_run(halfwidth: f64) -> SimulationConfig {
    SimulationConfig::new(Model::CtSimpleWalk, 1.0, halfwidth, 1, 7)
}
