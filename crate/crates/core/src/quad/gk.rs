//! 15-point Gauss–Kronrod rule with the classic QUADPACK error heuristic.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of one rule application on `[a, b]`, per component.
pub(crate) struct Panel {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
}

/// Applies the rule to a vector-valued integrand with `dim` components.
pub(crate) fn gk15<F>(f: &F, a: f64, b: f64, dim: usize) -> Panel
where
    F: Fn(f64) -> Vec<f64> + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    debug_assert_eq!(fc.len(), dim);
    let mut kronrod: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    let mut abs_sum: Vec<f64> = fc.iter().map(|v| v.abs() * WGK[7]).collect();

    let mut left = Vec::with_capacity(7);
    let mut right = Vec::with_capacity(7);
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for c in 0..dim {
            kronrod[c] += WGK[j] * (f1[c] + f2[c]);
            abs_sum[c] += WGK[j] * (f1[c].abs() + f2[c].abs());
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * (f1[c] + f2[c]);
            }
        }
        left.push(f1);
        right.push(f2);
    }

    let mut value = Vec::with_capacity(dim);
    let mut error = Vec::with_capacity(dim);
    for c in 0..dim {
        let mean = 0.5 * kronrod[c];
        let mut asc = WGK[7] * (fc[c] - mean).abs();
        for j in 0..7 {
            asc += WGK[j] * ((left[j][c] - mean).abs() + (right[j][c] - mean).abs());
        }
        let result = kronrod[c] * half;
        let resabs = abs_sum[c] * abs_half;
        let resasc = asc * abs_half;
        let mut err = ((kronrod[c] - gauss[c]) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        value.push(result);
        error.push(err);
    }
    Panel { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // Kronrod-15 is exact through degree 22
        let p = gk15(&|x: f64| vec![x.powi(10), 3.0 * x * x + 1.0], -1.0, 2.0, 2);
        assert!((p.value[0] - (2f64.powi(11) + 1.0) / 11.0).abs() < 1e-12);
        assert!((p.value[1] - 12.0).abs() < 1e-13);
    }
}
