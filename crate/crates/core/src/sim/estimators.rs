use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::Dynamics;
use super::run::{finite_run, PairSums, ReplicateSummary};
use crate::detcore::Threshold;
use crate::error::{Error, Result};

/// A point estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// `(value - target) / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target) / self.stderr
    }
}

/// One bin `[lo, hi]` of lattice gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: i64,
    pub hi: i64,
    pub count: u64,
    /// Fraction of all gaps falling in the bin.
    pub probability: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapHistogram {
    pub bins: Vec<HistogramBin>,
    pub total: u64,
    pub replicates: usize,
}

fn bin_of(g: i64, width: i64) -> i64 {
    (g - 1).div_euclid(width)
}

/// Ratio estimator `Σ c_r / Σ n_r` with linearized across-replicate
/// standard errors.
fn histogram(per_replicate: &[&BTreeMap<i64, u64>], width: i64) -> Result<GapHistogram> {
    if width < 1 {
        return Err(Error::InvalidInput(format!("bin width must be positive, got {width}")));
    }
    let r = per_replicate.len();
    let binned: Vec<BTreeMap<i64, u64>> = per_replicate
        .iter()
        .map(|m| {
            let mut b = BTreeMap::new();
            for (&g, &c) in m.iter() {
                *b.entry(bin_of(g, width)).or_insert(0) += c;
            }
            b
        })
        .collect();
    let totals: Vec<f64> = binned.iter().map(|b| b.values().sum::<u64>() as f64).collect();
    let total: f64 = totals.iter().sum();
    if total == 0.0 {
        return Err(Error::InvalidInput("empty observation window: no gaps recorded".into()));
    }
    let mut keys: Vec<i64> = binned.iter().flat_map(|b| b.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let bins = keys
        .into_iter()
        .map(|k| {
            let counts: Vec<f64> = binned.iter().map(|b| *b.get(&k).unwrap_or(&0) as f64).collect();
            let count: f64 = counts.iter().sum();
            let p = count / total;
            let stderr = if r > 1 {
                let ss: f64 = counts.iter().zip(&totals).map(|(c, n)| (c - p * n).powi(2)).sum();
                (ss * r as f64 / (r as f64 - 1.0)).sqrt() / total
            } else {
                (p * (1.0 - p) / total).sqrt()
            };
            HistogramBin { lo: k * width + 1, hi: (k + 1) * width, count: count as u64, probability: p, stderr }
        })
        .collect();
    Ok(GapHistogram { bins, total: total as u64, replicates: r })
}

/// Survivor gap pmf with bins of `width` lattice units.
pub fn empirical_gap_histogram(summaries: &[ReplicateSummary], width: i64) -> Result<GapHistogram> {
    histogram(&summaries.iter().map(|s| &s.gap_counts).collect::<Vec<_>>(), width)
}

/// Wall gap pmf with bins of `width` lattice units.
pub fn empirical_wall_gaps(summaries: &[ReplicateSummary], width: i64) -> Result<GapHistogram> {
    histogram(&summaries.iter().map(|s| &s.wall_gap_counts).collect::<Vec<_>>(), width)
}

/// Survivors per unit length (`spacing` converts lattice units to real
/// length).
pub fn survivor_density(summaries: &[ReplicateSummary], spacing: f64) -> Result<McEstimate> {
    let d: Vec<f64> = summaries
        .iter()
        .map(|s| s.survivors_in_window as f64 / (s.window_length * spacing))
        .collect();
    if d.is_empty() || summaries.iter().any(|s| !(s.window_length > 0.0)) {
        return Err(Error::InvalidInput("empty observation window".into()));
    }
    Ok(mean_and_stderr(&d))
}

fn mean_and_stderr(xs: &[f64]) -> McEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return McEstimate { value: mean, stderr: f64::NAN };
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    McEstimate { value: mean, stderr: (var / n).sqrt() }
}

/// Correlation between `G_i` and `G_{i+lag}` (`lag` 1 or 2) from pooled
/// pairs, with a leave-one-replicate-out jackknife standard error.
pub fn empirical_joint_gap_corr(summaries: &[ReplicateSummary], lag: usize) -> Result<McEstimate> {
    if !(1..=2).contains(&lag) {
        return Err(Error::InvalidInput(format!("lag must be 1 or 2, got {lag}")));
    }
    let mut pooled = PairSums::default();
    for s in summaries {
        pooled.add(&s.lag_pairs[lag - 1]);
    }
    if pooled.n < 3.0 {
        return Err(Error::InvalidInput("too few gap pairs in the observation window".into()));
    }
    let rho = pooled.correlation();
    let r = summaries.len() as f64;
    if summaries.len() < 2 {
        return Ok(McEstimate { value: rho, stderr: f64::NAN });
    }
    let loo: Vec<f64> = summaries
        .iter()
        .map(|s| {
            let mut p = pooled;
            p.sub(&s.lag_pairs[lag - 1]);
            p.correlation()
        })
        .collect();
    let mean = loo.iter().sum::<f64>() / r;
    let var = (r - 1.0) / r * loo.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    Ok(McEstimate { value: rho, stderr: var.sqrt() })
}

/// Per-bin z-scores of survivor minus wall gap frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramComparison {
    /// `(lo, hi, z)` per bin.
    pub z_scores: Vec<(i64, i64, f64)>,
    pub max_abs_z: f64,
}

/// Two-sample comparison of survivor and wall gap histograms. Differences
/// are taken per replicate so that within-window dependence is respected.
pub fn compare_wall_and_survivor_gaps(summaries: &[ReplicateSummary], width: i64) -> Result<HistogramComparison> {
    let s = empirical_gap_histogram(summaries, width)?;
    let w = empirical_wall_gaps(summaries, width)?;
    let mut lookup: BTreeMap<i64, (Option<HistogramBin>, Option<HistogramBin>)> = BTreeMap::new();
    for b in &s.bins {
        lookup.entry(b.lo).or_default().0 = Some(*b);
    }
    for b in &w.bins {
        lookup.entry(b.lo).or_default().1 = Some(*b);
    }
    let z_scores: Vec<(i64, i64, f64)> = lookup
        .into_iter()
        .filter_map(|(lo, (a, b))| {
            let hi = lo + width - 1;
            let (pa, sa) = a.map_or((0.0, 0.0), |b| (b.probability, b.stderr));
            let (pb, sb) = b.map_or((0.0, 0.0), |b| (b.probability, b.stderr));
            let se = (sa * sa + sb * sb).sqrt();
            (se > 0.0).then(|| (lo, hi, (pa - pb) / se))
        })
        .collect();
    let max_abs_z = z_scores.iter().map(|t| t.2.abs()).fold(0.0, f64::max);
    Ok(HistogramComparison { z_scores, max_abs_z })
}

/// Finite-start lattice dynamics for [`empirical_warren_cdf`] and friends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiniteModel {
    ParityWalk { steps: u64 },
    CtSimpleWalk { horizon: f64 },
}

impl FiniteModel {
    fn dynamics(self) -> Dynamics {
        match self {
            FiniteModel::ParityWalk { steps } => Dynamics::Synchronous { steps },
            FiniteModel::CtSimpleWalk { horizon } => Dynamics::Gillespie { rate: 1.0, horizon },
        }
    }

    fn check(self, starts: &[i64]) -> Result<()> {
        if starts.is_empty() || !starts.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("starts must be nonempty and strictly increasing".into()));
        }
        match self {
            FiniteModel::ParityWalk { .. } => {
                let p = starts[0].rem_euclid(2);
                if starts.iter().any(|s| s.rem_euclid(2) != p) {
                    return Err(Error::Config("parity-walk starts must share one sublattice".into()));
                }
            }
            FiniteModel::CtSimpleWalk { horizon } => {
                if !(horizon >= 0.0 && horizon.is_finite()) {
                    return Err(Error::NegativeTime(horizon));
                }
            }
        }
        Ok(())
    }
}

/// Frequency of an arbitrary event on the final clusters, with each
/// initial particle mapped to its survivor position.
pub fn empirical_event_frequency<F>(
    model: FiniteModel,
    starts: &[i64],
    replicates: u64,
    seed: u64,
    event: F,
) -> Result<McEstimate>
where
    F: Fn(&[i64]) -> bool + Sync,
{
    use rayon::prelude::*;
    model.check(starts)?;
    if replicates == 0 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    let hits: u64 = (0..replicates)
        .into_par_iter()
        .map(|r| -> Result<u64> {
            let clusters = finite_run(starts, model.dynamics(), seed, r)?;
            let mut z = vec![0i64; starts.len()];
            for c in &clusters {
                z[c.first as usize..=c.last as usize].fill(c.position);
            }
            Ok(event(&z) as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let p = hits as f64 / replicates as f64;
    Ok(McEstimate { value: p, stderr: (p * (1.0 - p) / replicates as f64).sqrt() })
}

/// Monte Carlo estimate of `P(Z_T(x_i) <= y_i for all i)`.
pub fn empirical_warren_cdf(
    model: FiniteModel,
    starts: &[i64],
    thresholds: &[Threshold<i64>],
    replicates: u64,
    seed: u64,
) -> Result<McEstimate> {
    if thresholds.len() != starts.len() {
        return Err(Error::InvalidInput("one threshold per start is required".into()));
    }
    empirical_event_frequency(model, starts, replicates, seed, |z| {
        z.iter().zip(thresholds).all(|(&zi, t)| match *t {
            Threshold::Infinite => true,
            Threshold::Finite(y) => zi <= y,
        })
    })
}

/// Draws a uniformly random strictly increasing sublattice configuration;
/// a test helper shared by the oracle checks.
pub fn random_sublattice_starts<R: Rng>(rng: &mut R, n: usize, parity: i64, max_spacing: i64) -> Vec<i64> {
    let mut x = 2 * rng.random_range(-3..=3) + parity;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x);
        x += 2 * rng.random_range(1..=max_spacing.max(1));
    }
    out
}
