use rand::{Rng, RngCore};
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// A surviving cluster: lattice position and the index range of the
/// initial particles it absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cluster {
    pub position: i64,
    pub first: u32,
    pub last: u32,
}

/// Lattice dynamics of a single cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dynamics {
    /// Synchronous `±1` steps, each with probability 1/2.
    Synchronous { steps: u64 },
    /// Continuous-time jumps `±1`, each direction at `rate`, until `horizon`.
    Gillespie { rate: f64, horizon: f64 },
}

const NONE: u32 = u32::MAX;

/// Upper bound on simulated events per run.
pub const MAX_EVENTS: u64 = 1 << 40;

/// Runs coalescing walkers from strictly increasing `starts` and returns
/// the surviving clusters from left to right.
pub fn evolve<R: RngCore>(starts: &[i64], dynamics: Dynamics, rng: &mut R) -> Result<Vec<Cluster>> {
    if starts.len() >= NONE as usize {
        return Err(Error::Config(format!("{} particles exceed the engine limit", starts.len())));
    }
    debug_assert!(starts.windows(2).all(|w| w[0] < w[1]));
    match dynamics {
        Dynamics::Synchronous { steps } => Ok(synchronous(starts, steps, rng)),
        Dynamics::Gillespie { rate, horizon } => gillespie(starts, rate, horizon, rng),
    }
}

fn initial(starts: &[i64]) -> Vec<Cluster> {
    starts.iter().enumerate().map(|(i, &p)| Cluster { position: p, first: i as u32, last: i as u32 }).collect()
}

fn synchronous<R: RngCore>(starts: &[i64], steps: u64, rng: &mut R) -> Vec<Cluster> {
    let mut clusters = initial(starts);
    for _ in 0..steps {
        let mut bits = 0u64;
        for (i, c) in clusters.iter_mut().enumerate() {
            if i % 64 == 0 {
                bits = rng.next_u64();
            }
            c.position += if bits & 1 == 1 { 1 } else { -1 };
            bits >>= 1;
        }
        // merge runs of equal positions; order is preserved by the
        // single-sublattice start
        let mut out: Vec<Cluster> = Vec::with_capacity(clusters.len());
        for c in clusters {
            match out.last_mut() {
                Some(prev) if prev.position == c.position => prev.last = c.last,
                _ => {
                    debug_assert!(out.last().is_none_or(|p| p.position < c.position));
                    out.push(c);
                }
            }
        }
        clusters = out;
    }
    clusters
}

fn gillespie<R: RngCore>(starts: &[i64], rate: f64, horizon: f64, rng: &mut R) -> Result<Vec<Cluster>> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Config(format!("jump rate must be positive, got {rate}")));
    }
    let n = starts.len();
    let mut position: Vec<i64> = starts.to_vec();
    let mut first: Vec<u32> = (0..n as u32).collect();
    let mut last: Vec<u32> = first.clone();
    let mut prev: Vec<u32> = (0..n as u32).map(|i| if i == 0 { NONE } else { i - 1 }).collect();
    let mut next: Vec<u32> = (0..n as u32).map(|i| if i + 1 == n as u32 { NONE } else { i + 1 }).collect();
    let mut alive: Vec<u32> = (0..n as u32).collect();
    let mut slot: Vec<u32> = (0..n as u32).collect();
    let mut head = if n == 0 { NONE } else { 0 };

    let mut t = 0.0;
    let mut events = 0u64;
    while !alive.is_empty() {
        let total = 2.0 * rate * alive.len() as f64;
        let dt: f64 = rng.sample::<f64, _>(Exp1) / total;
        t += dt;
        if t > horizon {
            break;
        }
        events += 1;
        if events > MAX_EVENTS {
            return Err(Error::Config("event budget exhausted".into()));
        }
        let r = rng.next_u64();
        let right = r & 1 == 1;
        let idx = (((r >> 1) as u128 * alive.len() as u128) >> 63) as usize;
        let c = alive[idx] as usize;
        let target = if right { next[c] } else { prev[c] };
        position[c] += if right { 1 } else { -1 };
        if target == NONE || position[target as usize] != position[c] {
            continue;
        }
        // c lands on its neighbour: fold c into it
        let tg = target as usize;
        if right {
            first[tg] = first[c];
        } else {
            last[tg] = last[c];
        }
        let (p, q) = (prev[c], next[c]);
        if p != NONE {
            next[p as usize] = q;
        } else {
            head = q;
        }
        if q != NONE {
            prev[q as usize] = p;
        }
        let s = slot[c] as usize;
        alive.swap_remove(s);
        if s < alive.len() {
            slot[alive[s] as usize] = s as u32;
        }
    }

    let mut out = Vec::with_capacity(alive.len());
    let mut c = head;
    while c != NONE {
        let i = c as usize;
        debug_assert!(out.last().is_none_or(|p: &Cluster| p.position < position[i]));
        out.push(Cluster { position: position[i], first: first[i], last: last[i] });
        c = next[i];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn contiguous(clusters: &[Cluster], n: usize) -> bool {
        clusters.first().is_some_and(|c| c.first == 0)
            && clusters.last().is_some_and(|c| c.last as usize == n - 1)
            && clusters.windows(2).all(|w| w[0].last + 1 == w[1].first && w[0].position < w[1].position)
    }

    #[test]
    fn zero_time_keeps_everyone() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let starts: Vec<i64> = (0..10).collect();
        let out = evolve(&starts, Dynamics::Gillespie { rate: 1.0, horizon: 0.0 }, &mut rng).unwrap();
        assert_eq!(out.len(), 10);
        let out = evolve(&starts, Dynamics::Synchronous { steps: 0 }, &mut rng).unwrap();
        assert_eq!(out.len(), 10);
    }

    #[test]
    fn basins_stay_contiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let starts: Vec<i64> = (-200..200).collect();
        for _ in 0..20 {
            let out = evolve(&starts, Dynamics::Gillespie { rate: 1.0, horizon: 5.0 }, &mut rng).unwrap();
            assert!(contiguous(&out, starts.len()));
            assert!(out.len() < starts.len());
        }
        let even: Vec<i64> = (-100..100).map(|i| 2 * i).collect();
        for _ in 0..20 {
            let out = evolve(&even, Dynamics::Synchronous { steps: 9 }, &mut rng).unwrap();
            assert!(contiguous(&out, even.len()));
            assert!(out.iter().all(|c| (c.position - 9).rem_euclid(2) == 0));
        }
    }
}
