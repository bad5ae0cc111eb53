//! Exact cluster-state dynamic programming for small parity-walk systems.
//!
//! A state is the ordered list of clusters (position plus the index range
//! of absorbed initial particles). Each step enumerates all `2^c` move
//! combinations of the `c` clusters at probability `2^{-c}`, merging
//! clusters that land on the same site. Probabilities are dyadic, so the
//! double-precision sums are exact at these sizes.

use std::collections::HashMap;

use super::engine::Cluster;
use crate::detcore::{CoalescencePattern, Threshold, WallParticlePattern};
use crate::error::{Error, Result};

pub const MAX_PARTICLES: usize = 16;
pub const MAX_STEPS: u64 = 6;
pub const MAX_STATES: usize = 2_000_000;

/// Exact law of the cluster state after `steps` parity-walk steps.
#[derive(Debug, Clone)]
pub struct ParityOracle {
    starts: Vec<i64>,
    steps: u64,
    law: Vec<(Vec<Cluster>, f64)>,
}

/// Events the oracle evaluates.
#[derive(Debug, Clone)]
pub enum DpQuery {
    Coalescence { pattern: CoalescencePattern, survivors: Vec<i64> },
    Warren { thresholds: Vec<Threshold<i64>> },
    /// One or more wall-particle patterns, each occurring as consecutive
    /// walls and survivors.
    WallParticle { patterns: Vec<WallParticlePattern<i64>> },
}

impl ParityOracle {
    pub fn new(starts: &[i64], steps: u64) -> Result<Self> {
        if starts.is_empty() || !starts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("starts must be nonempty and strictly increasing".into()));
        }
        let parity = starts[0].rem_euclid(2);
        if let Some(&s) = starts.iter().find(|s| s.rem_euclid(2) != parity) {
            return Err(Error::OffSublattice { site: s, parity });
        }
        if starts.len() > MAX_PARTICLES || steps > MAX_STEPS {
            return Err(Error::StateSpace(format!(
                "{} particles and {steps} steps exceed the oracle limits ({MAX_PARTICLES}, {MAX_STEPS})",
                starts.len()
            )));
        }
        let init: Vec<Cluster> = starts
            .iter()
            .enumerate()
            .map(|(i, &p)| Cluster { position: p, first: i as u32, last: i as u32 })
            .collect();
        let mut law = vec![(init, 1.0)];
        for _ in 0..steps {
            law = step(&law)?;
        }
        law.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { starts: starts.to_vec(), steps, law })
    }

    /// Every sublattice site of `lo`'s parity in `[lo, hi]`.
    pub fn fully_occupied(lo: i64, hi: i64, steps: u64) -> Result<Self> {
        let sites: Vec<i64> = (lo..=hi).step_by(2).collect();
        Self::new(&sites, steps)
    }

    pub fn starts(&self) -> &[i64] {
        &self.starts
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Final states and their probabilities, sorted by state.
    pub fn law(&self) -> &[(Vec<Cluster>, f64)] {
        &self.law
    }

    pub fn probability(&self, event: impl Fn(&[Cluster]) -> bool) -> f64 {
        self.law.iter().filter(|(s, _)| event(s)).map(|(_, p)| p).sum()
    }

    pub fn query(&self, query: &DpQuery) -> Result<f64> {
        match query {
            DpQuery::Coalescence { pattern, survivors } => self.coalescence_probability(pattern, survivors),
            DpQuery::Warren { thresholds } => self.warren_cdf(thresholds),
            DpQuery::WallParticle { patterns } => self.wall_particle_probability(patterns),
        }
    }

    /// Probability that the blocks of `pattern` coalesce onto `survivors`.
    pub fn coalescence_probability(&self, pattern: &CoalescencePattern, survivors: &[i64]) -> Result<f64> {
        if pattern.particles() != self.starts.len() || pattern.survivors() != survivors.len() {
            return Err(Error::InvalidInput("pattern does not fit the oracle starts".into()));
        }
        let parts = pattern.parts();
        Ok(self.probability(|s| {
            s.len() == parts.len()
                && s.iter().zip(parts).zip(survivors).all(|((c, &n), &y)| (c.last - c.first + 1) as usize == n && c.position == y)
        }))
    }

    /// `P(Z(x_i) <= y_i for all i)`.
    pub fn warren_cdf(&self, thresholds: &[Threshold<i64>]) -> Result<f64> {
        if thresholds.len() != self.starts.len() {
            return Err(Error::InvalidInput("one threshold per start is required".into()));
        }
        Ok(self.probability(|s| {
            s.iter().all(|c| {
                (c.first..=c.last).all(|i| match thresholds[i as usize] {
                    Threshold::Infinite => true,
                    Threshold::Finite(y) => c.position <= y,
                })
            })
        }))
    }

    fn index_of(&self, site: i64) -> Result<u32> {
        self.starts
            .binary_search(&site)
            .map(|i| i as u32)
            .map_err(|_| Error::InvalidInput(format!("flanking site {site} is not an initial particle")))
    }

    /// Probability that each pattern's walls and survivors occur as
    /// consecutive walls and survivors.
    pub fn wall_particle_probability(&self, patterns: &[WallParticlePattern<i64>]) -> Result<f64> {
        let mut specs = Vec::with_capacity(patterns.len());
        for p in patterns {
            let mut flanks = Vec::with_capacity(p.k());
            for &w in p.walls() {
                if w.fract() != 0.0 || (w as i64 - self.starts[0]).rem_euclid(2) != 1 {
                    return Err(Error::InvalidInput(format!("wall {w} is not between sublattice sites")));
                }
                let w = w as i64;
                flanks.push((self.index_of(w - 1)?, self.index_of(w + 1)?));
            }
            specs.push((flanks, p.survivors().to_vec()));
        }
        Ok(self.probability(|s| specs.iter().all(|(flanks, ys)| pattern_holds(s, flanks, ys))))
    }
}

fn pattern_holds(state: &[Cluster], flanks: &[(u32, u32)], ys: &[i64]) -> bool {
    let Some(c0) = state.iter().position(|c| c.first <= flanks[0].0 && flanks[0].0 <= c.last) else {
        return false;
    };
    if state[c0].last != flanks[0].0 || state[c0].position != ys[0] {
        return false;
    }
    for (j, &(_, b)) in flanks.iter().enumerate() {
        let Some(c) = state.get(c0 + j + 1) else {
            return false;
        };
        if c.first != b || c.position != ys[j + 1] {
            return false;
        }
        if let Some(&(a_next, _)) = flanks.get(j + 1) {
            if c.last != a_next {
                return false;
            }
        }
    }
    true
}

fn step(law: &[(Vec<Cluster>, f64)]) -> Result<Vec<(Vec<Cluster>, f64)>> {
    let mut next: HashMap<Vec<Cluster>, f64> = HashMap::new();
    let mut moved: Vec<Cluster> = Vec::new();
    for (state, p) in law {
        let c = state.len();
        let weight = p / (1u64 << c) as f64;
        for mask in 0u32..(1u32 << c) {
            moved.clear();
            for (i, cl) in state.iter().enumerate() {
                let position = cl.position + if mask >> i & 1 == 1 { 1 } else { -1 };
                match moved.last_mut() {
                    Some(prev) if prev.position == position => prev.last = cl.last,
                    _ => moved.push(Cluster { position, ..*cl }),
                }
            }
            *next.entry(moved.clone()).or_insert(0.0) += weight;
        }
        if next.len() > MAX_STATES {
            return Err(Error::StateSpace(format!("more than {MAX_STATES} cluster states")));
        }
    }
    Ok(next.into_iter().collect())
}

/// Evaluates `query` exactly for parity walkers from `starts`.
pub fn dp_oracle(starts: &[i64], steps: u64, query: &DpQuery) -> Result<f64> {
    ParityOracle::new(starts, steps)?.query(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detcore::{coalescence_probability, finite_thresholds, warren_cdf};
    use crate::kernels::DiscreteKernel;

    #[test]
    fn two_particles_one_step() {
        let o = ParityOracle::new(&[0, 2], 1).unwrap();
        let merged = o.probability(|s| s.len() == 1 && s[0].position == 1);
        assert_eq!(merged, 0.25);
        assert_eq!(o.probability(|s| s.len() == 2), 0.75);
        let total: f64 = o.law().iter().map(|(_, p)| p).sum();
        assert_eq!(total, 1.0);
    }

    #[test]
    fn three_particles_two_plus_one() {
        let k = DiscreteKernel::parity_walk(2, 0).unwrap();
        let o = ParityOracle::new(&[0, 2, 4], 2).unwrap();
        let pat = CoalescencePattern::new(vec![2, 1]).unwrap();
        for ys in [[0, 2], [0, 4], [2, 4], [-2, 4], [0, 6], [2, 6]] {
            let d = coalescence_probability(&k, &[0, 2, 4], &pat, &ys).unwrap().value;
            let e = o.coalescence_probability(&pat, &ys).unwrap();
            assert!((d - e).abs() < 1e-14, "{ys:?}: {d} vs {e}");
        }
    }

    #[test]
    fn warren_agrees_with_determinant() {
        let k = DiscreteKernel::parity_walk(3, 0).unwrap();
        let starts = [0, 2, 6];
        let o = ParityOracle::new(&starts, 3).unwrap();
        for ys in [[-1, 1, 5], [0, 0, 3], [1, 3, 7], [-3, 2, 2]] {
            let t = finite_thresholds(&ys).unwrap();
            let d = warren_cdf(&k, &starts, &t).unwrap().value;
            assert!((d - o.warren_cdf(&t).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn limits_enforced() {
        assert!(matches!(ParityOracle::new(&[0, 2], 7), Err(Error::StateSpace(_))));
        assert!(matches!(ParityOracle::new(&[0, 1], 1), Err(Error::OffSublattice { .. })));
        let sites: Vec<i64> = (0..17).map(|i| 2 * i).collect();
        assert!(ParityOracle::new(&sites, 1).is_err());
    }
}
