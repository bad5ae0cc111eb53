//! Exponentially scaled modified Bessel functions of integer order.
//!
//! Everything here returns `e^{-x} I_n(x)` so that the values stay
//! representable for the large arguments reached by long walks
//! (`x = 2t` grows past the overflow point of `I_n` near 700).

/// Argument below which the ascending series is used.
pub const SERIES_LIMIT: f64 = 30.0;

/// Returns `e^{-x} I_n(x)` for `n = 0..=n_max`.
///
/// Small arguments use the ascending series term by term; larger ones use
/// Miller's downward recurrence normalised with `I_0 + 2 sum I_k = e^x`.
pub fn scaled_bessel_i_table(x: f64, n_max: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and >= 0");
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    if x <= SERIES_LIMIT {
        series_table(x, n_max)
    } else {
        miller_table(x, n_max)
    }
}

fn series_table(x: f64, n_max: usize) -> Vec<f64> {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let mut out = Vec::with_capacity(n_max + 1);
    // leading coefficient e^{-x} (x/2)^n / n!, updated multiplicatively in n
    let mut lead = (-x).exp();
    for n in 0..=n_max {
        if n > 0 {
            lead *= half / n as f64;
        }
        if lead == 0.0 {
            out.push(0.0);
            continue;
        }
        let mut term = lead;
        let mut sum = lead;
        let mut k = 0usize;
        loop {
            k += 1;
            term *= quarter_sq / (k as f64 * (k + n) as f64);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        out.push(sum);
    }
    out
}

fn miller_table(x: f64, n_max: usize) -> Vec<f64> {
    // e^{-x} I_k(x) behaves like exp(-k^2 / 2x) for k << x, so 16 sqrt(x)
    // orders beyond the centre the neglected mass is far below 1e-40.
    let start = n_max.max((16.0 * x.sqrt()).ceil() as usize) + 40;
    let mut v = vec![0.0f64; start + 2];
    v[start] = 1e-280;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let next = v[k + 1] + (k as f64) * two_over_x * v[k];
        v[k - 1] = next;
        if next > 1e250 {
            for value in v[k - 1..=start].iter_mut() {
                *value *= 1e-250;
            }
        }
    }
    let tail: f64 = v[1..=start].iter().rev().sum();
    let norm = v[0] + 2.0 * tail;
    v.truncate(n_max + 1);
    v.resize(n_max + 1, 0.0);
    for value in v.iter_mut() {
        *value /= norm;
    }
    v
}
