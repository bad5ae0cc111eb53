//! Independent oracles for the kernels and the determinant.

use coalesce_core::detcore::{brownian_m0, SquareMatrix, WallParticlePattern};
use coalesce_core::kernels::{ContinuousKernel, DiscreteKernel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn laplace(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * laplace(&minor)
        })
        .sum()
}

#[test]
fn lu_determinant_matches_cofactor_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=6 {
        for _ in 0..20 {
            let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
            let m = SquareMatrix::new(n, rows.concat()).unwrap();
            let lu = m.determinant().unwrap();
            let exact = laplace(&rows);
            assert!((lu - exact).abs() <= 1e-12 * (1.0 + exact.abs()), "n={n}: {lu} vs {exact}");
        }
    }
}

#[test]
fn singular_and_permuted_matrices() {
    let m = SquareMatrix::new(3, vec![1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 5.0]).unwrap();
    assert_eq!(m.determinant().unwrap(), 0.0);
    let p = SquareMatrix::new(3, vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
    assert_eq!(p.determinant().unwrap(), -1.0);
}

/// Transition probabilities by uniformization of the truncated generator.
fn uniformized(t: f64, half: usize) -> Vec<f64> {
    let n = 2 * half + 1;
    let lambda = 2.0;
    let mut v = vec![0.0; n];
    v[half] = 1.0;
    let mut out = vec![0.0; n];
    let mut weight = (-lambda * t).exp();
    for k in 0..400 {
        for (o, x) in out.iter_mut().zip(&v) {
            *o += weight * x;
        }
        // one step of I + Q/λ: half the mass to each neighbour
        let mut next = vec![0.0; n];
        for i in 0..n {
            if i > 0 {
                next[i - 1] += 0.5 * v[i];
            }
            if i + 1 < n {
                next[i + 1] += 0.5 * v[i];
            }
        }
        v = next;
        weight *= lambda * t / (k + 1) as f64;
    }
    out
}

#[test]
fn bessel_kernel_matches_matrix_exponential() {
    for t in [0.1, 1.0, 3.5, 8.0] {
        let k = DiscreteKernel::ct_simple_walk(t).unwrap();
        let p = uniformized(t, 80);
        for d in -30i64..=30 {
            let a = k.displacement_prob(d);
            let b = p[(80 + d) as usize];
            assert!((a - b).abs() < 1e-13, "t={t} d={d}: {a} vs {b}");
        }
    }
}

#[test]
fn chapman_kolmogorov() {
    for (s, t) in [(0.5, 1.5), (2.0, 3.0), (0.25, 0.25)] {
        let ks = DiscreteKernel::ct_simple_walk(s).unwrap();
        let kt = DiscreteKernel::ct_simple_walk(t).unwrap();
        let kst = DiscreteKernel::ct_simple_walk(s + t).unwrap();
        for y in -6..=6 {
            let conv: f64 = (-80..=80).map(|z| ks.displacement_prob(z) * kt.displacement_prob(y - z)).sum();
            assert!((conv - kst.displacement_prob(y)).abs() < 1e-14);
        }
    }
    let p2 = DiscreteKernel::parity_walk(2, 0).unwrap();
    let p3 = DiscreteKernel::parity_walk(3, 0).unwrap();
    let p5 = DiscreteKernel::parity_walk(5, 0).unwrap();
    for y in -5..=5 {
        let conv: f64 = (-3..=3).map(|z| p2.displacement_prob(z) * p3.displacement_prob(y - z)).sum();
        assert!((conv - p5.displacement_prob(y)).abs() < 1e-15);
    }
}

#[test]
fn source_derivatives_match_finite_differences() {
    let h = 1e-5;
    for kernel in [ContinuousKernel::gaussian(0.7).unwrap(), ContinuousKernel::reflected_gaussian(1.3).unwrap()] {
        for (x, y) in [(0.4, 1.0), (1.2, 0.3), (2.0, 2.5)] {
            let fd = (kernel.density(x + h, y).unwrap() - kernel.density(x - h, y).unwrap()) / (2.0 * h);
            assert!((fd - kernel.d_source_density(x, y).unwrap()).abs() < 1e-8);
            let fd = (kernel.cdf(x + h, y).unwrap() - kernel.cdf(x - h, y).unwrap()) / (2.0 * h);
            assert!((fd - kernel.d_source_cdf(x, y).unwrap()).abs() < 1e-8);
        }
    }
}

#[test]
fn brownian_k1_intensity_against_explicit_formula() {
    // det [[p(x,y0), p(x,y1)], [∂p(x,y0), ∂p(x,y1)]] with p the heat kernel
    let t: f64 = 1.3;
    let heat = |d: f64| (-d * d / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t).sqrt();
    for (x, y0, y1) in [(0.2, -0.5, 1.1), (0.0, -1.0, 1.0), (1.5, 0.4, 2.9)] {
        let m = brownian_m0(&WallParticlePattern::new(vec![x], vec![y0, y1]).unwrap(), t).unwrap();
        let a = heat(y0 - x);
        let b = heat(y1 - x);
        let expected = a * b * (y1 - x) / t - b * a * (y0 - x) / t;
        assert!((m.determinant().unwrap() - expected).abs() < 1e-15);
    }
}
