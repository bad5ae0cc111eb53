use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SimulationConfig;
use super::engine::{evolve, Cluster};
use crate::error::{Error, Result};

/// Survivors, basins and walls of one replicate, in lattice units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivorConfiguration {
    /// Real length of one lattice site.
    pub spacing: f64,
    /// Survivor sites at the horizon, increasing.
    pub survivors: Vec<i64>,
    /// Leftmost and rightmost initial site absorbed by each survivor.
    pub basins: Vec<(i64, i64)>,
    /// Midpoints between adjacent basins.
    pub walls: Vec<f64>,
    /// Margin-trimmed window `[lo, hi)`.
    pub observation_window: (f64, f64),
}

impl SurvivorConfiguration {
    fn from_clusters(starts: &[i64], clusters: &[Cluster], spacing: f64, window: (f64, f64)) -> Self {
        let survivors = clusters.iter().map(|c| c.position).collect();
        let basins: Vec<(i64, i64)> =
            clusters.iter().map(|c| (starts[c.first as usize], starts[c.last as usize])).collect();
        let walls = basins.windows(2).map(|w| (w[0].1 + w[1].0) as f64 / 2.0).collect();
        Self { spacing, survivors, basins, walls, observation_window: window }
    }

    pub fn survivors_real(&self) -> Vec<f64> {
        self.survivors.iter().map(|&y| y as f64 * self.spacing).collect()
    }

    pub fn walls_real(&self) -> Vec<f64> {
        self.walls.iter().map(|&w| w * self.spacing).collect()
    }

    fn inside(&self, x: f64) -> bool {
        x >= self.observation_window.0 && x < self.observation_window.1
    }

    /// Gaps `y_{i+1} - y_i` whose left survivor lies in the window.
    pub fn extract_gaps(&self) -> Vec<i64> {
        self.survivors.windows(2).filter(|w| self.inside(w[0] as f64)).map(|w| w[1] - w[0]).collect()
    }

    /// Wall gaps whose left wall lies in the window.
    pub fn extract_wall_gaps(&self) -> Vec<i64> {
        self.walls.windows(2).filter(|w| self.inside(w[0])).map(|w| (w[1] - w[0]).round() as i64).collect()
    }

    /// Checks ordering, basin contiguity and wall interleaving.
    pub fn check_invariants(&self, starts: &[i64]) -> Result<()> {
        let fail = |m: &str| Err(Error::StateSpace(format!("replicate invariant broken: {m}")));
        if !self.survivors.windows(2).all(|w| w[0] < w[1]) {
            return fail("survivors out of order");
        }
        let index = |s: i64| starts.binary_search(&s).ok();
        let mut expect = 0usize;
        for &(l, r) in &self.basins {
            match (index(l), index(r)) {
                (Some(i), Some(j)) if i == expect && j >= i => expect = j + 1,
                _ => return fail("basins do not partition the initial sites"),
            }
        }
        if expect != starts.len() {
            return fail("basins do not cover the initial sites");
        }
        for (i, w) in self.walls.iter().enumerate() {
            if !((self.basins[i].1 as f64) < *w && *w < self.basins[i + 1].0 as f64) {
                return fail("wall outside its basin gap");
            }
        }
        Ok(())
    }
}

/// Sums over adjacent-gap pairs at a fixed lag.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PairSums {
    pub n: f64,
    pub sx: f64,
    pub sy: f64,
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
}

impl PairSums {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    pub fn add(&mut self, o: &PairSums) {
        self.n += o.n;
        self.sx += o.sx;
        self.sy += o.sy;
        self.sxx += o.sxx;
        self.syy += o.syy;
        self.sxy += o.sxy;
    }

    pub fn sub(&mut self, o: &PairSums) {
        self.n -= o.n;
        self.sx -= o.sx;
        self.sy -= o.sy;
        self.sxx -= o.sxx;
        self.syy -= o.syy;
        self.sxy -= o.sxy;
    }

    /// Pearson correlation of the pooled pairs.
    pub fn correlation(&self) -> f64 {
        let mx = self.sx / self.n;
        let my = self.sy / self.n;
        let cov = self.sxy / self.n - mx * my;
        let vx = self.sxx / self.n - mx * mx;
        let vy = self.syy / self.n - my * my;
        cov / (vx * vy).sqrt()
    }
}

/// Per-replicate tallies; aggregation over replicates is a plain sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub replicate: u64,
    /// Observation window length in lattice units.
    pub window_length: f64,
    pub survivors_in_window: u64,
    /// Survivor gap counts keyed by lattice gap.
    pub gap_counts: BTreeMap<i64, u64>,
    /// Wall gap counts keyed by lattice gap.
    pub wall_gap_counts: BTreeMap<i64, u64>,
    /// Gap pairs `(G_i, G_{i+1})` and `(G_i, G_{i+2})`.
    pub lag_pairs: [PairSums; 2],
}

impl ReplicateSummary {
    pub fn from_configuration(replicate: u64, cfg: &SurvivorConfiguration) -> Self {
        let (lo, hi) = cfg.observation_window;
        let survivors_in_window = cfg.survivors.iter().filter(|&&y| cfg.inside(y as f64)).count() as u64;
        let mut gap_counts = BTreeMap::new();
        for g in cfg.extract_gaps() {
            *gap_counts.entry(g).or_insert(0) += 1;
        }
        let mut wall_gap_counts = BTreeMap::new();
        for g in cfg.extract_wall_gaps() {
            *wall_gap_counts.entry(g).or_insert(0) += 1;
        }
        let ys = &cfg.survivors;
        let mut lag_pairs = [PairSums::default(); 2];
        for i in 0..ys.len() {
            if !cfg.inside(ys[i] as f64) {
                continue;
            }
            for (lag, sums) in lag_pairs.iter_mut().enumerate() {
                let far = i + lag + 2;
                if far < ys.len() {
                    sums.push((ys[i + 1] - ys[i]) as f64, (ys[far] - ys[far - 1]) as f64);
                }
            }
        }
        Self {
            replicate,
            window_length: hi - lo,
            survivors_in_window,
            gap_counts,
            wall_gap_counts,
            lag_pairs,
        }
    }

    pub fn gaps_in_window(&self) -> u64 {
        self.gap_counts.values().sum()
    }
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// One replicate of `config`; the RNG stream depends only on the seed and
/// the replicate index.
pub fn simulate_replicate(config: &SimulationConfig, replicate: u64) -> Result<SurvivorConfiguration> {
    config.validate()?;
    let (starts, window) = config.layout();
    let mut rng = replicate_rng(config.seed, replicate);
    let clusters = evolve(&starts, config.dynamics(), &mut rng)?;
    let out = SurvivorConfiguration::from_clusters(&starts, &clusters, config.spacing(), window);
    out.check_invariants(&starts)?;
    Ok(out)
}

/// Replicates of `config` in order, generated lazily.
pub fn simulate(config: &SimulationConfig) -> Result<impl Iterator<Item = Result<SurvivorConfiguration>> + '_> {
    config.validate()?;
    Ok((0..config.replicates).map(move |r| simulate_replicate(config, r)))
}

/// All replicate summaries, computed in parallel and returned in replicate
/// order.
pub fn run_replicates(config: &SimulationConfig) -> Result<Vec<ReplicateSummary>> {
    config.validate()?;
    (0..config.replicates)
        .into_par_iter()
        .map(|r| simulate_replicate(config, r).map(|c| ReplicateSummary::from_configuration(r, &c)))
        .collect()
}

/// Runs coalescing walkers from a finite configuration and reports the
/// cluster holding each initial particle.
pub(crate) fn finite_run(
    starts: &[i64],
    dynamics: super::engine::Dynamics,
    seed: u64,
    replicate: u64,
) -> Result<Vec<Cluster>> {
    let mut rng = replicate_rng(seed, replicate);
    evolve(starts, dynamics, &mut rng)
}
