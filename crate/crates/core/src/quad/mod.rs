//! Adaptive Gauss–Kronrod integration on truncated unbounded domains and on
//! ordered simplices `{u_1 < … < u_k}`.
//!
//! All integrators are vector-valued underneath: several integrands sharing
//! one set of nodes cost a single pass. Every result carries an error
//! estimate; nested integrals add the integrated inner error estimates to
//! the outer one.

mod gk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use gk::gk15;

/// Hard cap on the number of live subintervals in one adaptive run.
const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Infinite endpoints are cut at `center ± radius * scale`.
    pub truncation_radius_sigma: f64,
    /// Maximal bisection depth of any subinterval.
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { relative_tolerance: 1e-9, absolute_tolerance: 1e-12, truncation_radius_sigma: 8.0, max_subdivisions: 24 }
    }
}

impl QuadratureSpec {
    /// Default for three nested levels.
    pub fn three_dimensional() -> Self {
        Self { relative_tolerance: 1e-6, ..Self::default() }
    }

    pub fn with_relative_tolerance(self, relative_tolerance: f64) -> Self {
        Self { relative_tolerance, ..self }
    }

    pub fn with_absolute_tolerance(self, absolute_tolerance: f64) -> Self {
        Self { absolute_tolerance, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.absolute_tolerance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must be positive: rel {}, abs {}",
                self.relative_tolerance, self.absolute_tolerance
            )));
        }
        if !(self.truncation_radius_sigma >= 4.0) {
            return Err(Error::InvalidInput(format!(
                "truncation radius must be at least 4, got {}",
                self.truncation_radius_sigma
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidInput("max_subdivisions must be positive".into()));
        }
        Ok(())
    }
}

/// Integral value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Component-wise integral values with error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecEstimate {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl VecEstimate {
    pub fn component(&self, c: usize) -> Estimate {
        Estimate { value: self.values[c], error: self.errors[c] }
    }
}

/// Location and width of the region carrying an integrand's mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayHint {
    pub center: f64,
    pub scale: f64,
}

impl DecayHint {
    pub fn new(center: f64, scale: f64) -> Self {
        Self { center, scale }
    }

    /// `[center - R scale, center + R scale]`.
    pub fn window(&self, spec: &QuadratureSpec) -> (f64, f64) {
        let r = spec.truncation_radius_sigma * self.scale;
        (self.center - r, self.center + r)
    }

    fn truncate(&self, lo: f64, hi: f64, spec: &QuadratureSpec) -> (f64, f64) {
        let (wlo, whi) = self.window(spec);
        let lo = if lo == f64::NEG_INFINITY { wlo.min(hi) } else { lo };
        let hi = if hi == f64::INFINITY { whi.max(lo) } else { hi };
        (lo, hi)
    }
}

struct Interval {
    a: f64,
    b: f64,
    depth: u32,
    value: Vec<f64>,
    error: Vec<f64>,
}

/// Globally adaptive bisection. Only the first `control` components steer
/// refinement; the rest are integrated on the same nodes.
fn adaptive<F>(f: &F, a: f64, b: f64, dim: usize, control: usize, spec: &QuadratureSpec) -> Result<VecEstimate>
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    if a == b {
        return Ok(VecEstimate { values: vec![0.0; dim], errors: vec![0.0; dim] });
    }
    let first = gk15(f, a, b, dim);
    let mut intervals = vec![Interval { a, b, depth: 0, value: first.value, error: first.error }];
    loop {
        let mut total = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        for iv in &intervals {
            for c in 0..dim {
                total[c] += iv.value[c];
                err[c] += iv.error[c];
            }
        }
        let tol: Vec<f64> = (0..control)
            .map(|c| spec.absolute_tolerance.max(spec.relative_tolerance * total[c].abs()))
            .collect();
        if (0..control).all(|c| err[c] <= tol[c]) {
            return Ok(VecEstimate { values: total, errors: err });
        }
        for c in 0..dim {
            if !total[c].is_finite() {
                return Err(Error::NonConvergence(format!("non-finite integrand on [{a}, {b}]")));
            }
        }
        let worst = intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| iv.depth < spec.max_subdivisions)
            .map(|(i, iv)| (i, (0..control).map(|c| iv.error[c] / tol[c]).sum::<f64>()))
            .max_by(|x, y| x.1.total_cmp(&y.1));
        let Some((idx, _)) = worst else {
            return Err(Error::NonConvergence(format!(
                "bisection depth {} exhausted on [{a}, {b}], error {:?} vs tolerance {:?}",
                spec.max_subdivisions, &err[..control], tol
            )));
        };
        if intervals.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence(format!(
                "{MAX_INTERVALS} subintervals exhausted on [{a}, {b}], error {:?} vs tolerance {:?}",
                &err[..control],
                tol
            )));
        }
        let (ia, ib, depth) = (intervals[idx].a, intervals[idx].b, intervals[idx].depth);
        let mid = 0.5 * (ia + ib);
        let l = gk15(f, ia, mid, dim);
        let r = gk15(f, mid, ib, dim);
        intervals[idx] = Interval { a: ia, b: mid, depth: depth + 1, value: l.value, error: l.error };
        intervals.push(Interval { a: mid, b: ib, depth: depth + 1, value: r.value, error: r.error });
    }
}

fn truncated_bounds(lo: f64, hi: f64, hint: Option<DecayHint>, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidInput(format!("invalid integration bounds [{lo}, {hi}]")));
    }
    let (lo, hi) = match hint {
        Some(h) => h.truncate(lo, hi, spec),
        None => (lo, hi),
    };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidInput("infinite bounds need a decay hint".into()));
    }
    Ok((lo, hi))
}

/// `∫_lo^hi f`, with infinite bounds truncated by `hint`.
pub fn integrate_1d(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    hint: Option<DecayHint>,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let (lo, hi) = truncated_bounds(lo, hi, hint, spec)?;
    let r = adaptive(&|x: f64| vec![f(x)], lo, hi, 1, 1, spec)?;
    Ok(r.component(0))
}

/// Vector-valued `∫_lo^hi f`; every component must meet the tolerance.
pub fn integrate_1d_vec(
    f: impl Fn(f64) -> Vec<f64>,
    dim: usize,
    lo: f64,
    hi: f64,
    hint: Option<DecayHint>,
    spec: &QuadratureSpec,
) -> Result<VecEstimate> {
    let (lo, hi) = truncated_bounds(lo, hi, hint, spec)?;
    adaptive(&f, lo, hi, dim, dim, spec)
}

/// `∫∫_{lo < u < v < hi} f(u, v)`, integrated as `u ∈ [lo, hi]`,
/// `w = v - u ∈ [0, hi - u]`.
pub fn integrate_ordered_2d(f: impl Fn(f64, f64) -> f64, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let r = integrate_ordered_vec(|u: &[f64]| vec![f(u[0], u[1])], 1, 2, lo, hi, spec)?;
    Ok(r.component(0))
}

/// `∫_{lo < u_1 < … < u_k < hi} f(u)` for `k ≤ 3`.
pub fn integrate_ordered_kd(f: impl Fn(&[f64]) -> f64, k: usize, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let r = integrate_ordered_vec(|u: &[f64]| vec![f(u)], 1, k, lo, hi, spec)?;
    Ok(r.component(0))
}

/// Vector-valued ordered integral; the engine behind the other ordered
/// integrators.
pub fn integrate_ordered_vec(
    f: impl Fn(&[f64]) -> Vec<f64>,
    dim: usize,
    k: usize,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<VecEstimate> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidInput(format!("ordered integration supports 1 to 3 variables, got {k}")));
    }
    let (lo, hi) = truncated_bounds(lo, hi, None, spec)?;
    let mut prefix = Vec::with_capacity(k);
    ordered_level(&f, dim, k, &mut prefix, lo, hi, spec)
}

/// Integrates the remaining `k - prefix.len()` variables, the next one
/// starting at the last fixed coordinate (or `lo`).
fn ordered_level<F>(
    f: &F,
    dim: usize,
    k: usize,
    prefix: &mut Vec<f64>,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<VecEstimate>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let base = prefix.last().copied().unwrap_or(lo);
    let span = hi - base;
    if prefix.len() + 1 == k {
        let g = |w: f64| {
            let mut point = prefix.clone();
            point.push(base + w);
            f(&point)
        };
        return adaptive(&g, 0.0, span, dim, dim, spec);
    }
    // components: inner values, then inner error estimates
    let failure = std::cell::RefCell::new(None);
    let g = |w: f64| {
        let mut point = prefix.clone();
        point.push(base + w);
        match ordered_level(f, dim, k, &mut point, lo, hi, spec) {
            Ok(inner) => {
                let mut out = inner.values;
                out.extend(inner.errors);
                out
            }
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                vec![0.0; 2 * dim]
            }
        }
    };
    let outer = adaptive(&g, 0.0, span, 2 * dim, dim, spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outer = outer?;
    let values = outer.values[..dim].to_vec();
    let errors = (0..dim).map(|c| outer.errors[c] + outer.values[dim + c].abs() + outer.errors[dim + c]).collect();
    Ok(VecEstimate { values, errors })
}
