//! Fixed quadrature rules for triangles and segments, an adaptive
//! Gauss-Kronrod integrator for smooth 1-D integrands, and compensated
//! summation used wherever results must be order-independent of threading.

/// Symmetric 6-point rule on the reference triangle, exact for degree 4.
/// Entries are `(barycentric coordinates, weight)` with weights summing to 1.
pub const TRIANGLE_DEG4: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_964_9;
    const B1: f64 = 0.108_103_018_168_070_2;
    const W1: f64 = 0.223_381_589_678_011_5;
    const A2: f64 = 0.091_576_213_509_770_74;
    const B2: f64 = 0.816_847_572_980_458_5;
    const W2: f64 = 0.109_951_743_655_321_9;
    [
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
};

/// Nodes and weights of the 3-point Gauss-Legendre rule on `[0, 1]`, exact
/// for degree 5.
pub fn gauss3() -> [(f64, f64); 3] {
    let d = 0.5 * (3.0f64 / 5.0).sqrt();
    [(0.5 - d, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + d, 5.0 / 18.0)]
}

/// Neumaier-compensated sum of a sequence, evaluated in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-panel |Kronrod - Gauss| estimates.
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// One G7-K15 panel: returns (kronrod estimate, |kronrod - gauss|).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = hw * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    (k * hw, ((k - g) * hw).abs())
}

/// Globally adaptive G7-K15 quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below `tol` or `max_panels` is reached.
pub fn adaptive_gk15<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_panels: usize,
) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
            evaluations: 0,
        };
    }
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = gk15(&mut f, a, b);
    panels.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let total_err: f64 = compensated_sum(panels.iter().map(|p| p.3));
        if total_err <= tol || panels.len() >= max_panels {
            let value = compensated_sum(panels.iter().map(|p| p.2));
            return Integral {
                value,
                error: total_err,
                converged: total_err <= tol,
                evaluations,
            };
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // panel can no longer be split in floating point
            let value = compensated_sum(panels.iter().map(|p| p.2));
            return Integral {
                value,
                error: total_err,
                converged: false,
                evaluations,
            };
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        evaluations += 30;
        panels.push((pa, mid, v1, e1));
        panels.push((mid, pb, v2, e2));
    }
}

/// Fixed G7-K15 over `n` equal panels; used for the inner integral of
/// polynomial-in-radius integrands where one panel is already exact.
pub fn fixed_gk15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    compensated_sum((0..n).map(|i| gk15(&mut f, a + i as f64 * h, a + (i + 1) as f64 * h).0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_rule_weights_sum_to_one() {
        let s: f64 = TRIANGLE_DEG4.iter().map(|q| q.1).sum();
        assert!((s - 1.0).abs() < 1e-15);
        for (b, _) in TRIANGLE_DEG4 {
            assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_rule_is_degree_four_exact() {
        // reference triangle (0,0),(1,0),(0,1): int x^a y^b = a! b! / (a+b+2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for a in 0..=4u32 {
            for b in 0..=(4 - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let q: f64 = TRIANGLE_DEG4
                    .iter()
                    .map(|(l, w)| 0.5 * w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum();
                assert!((q - exact).abs() < 1e-15, "x^{a} y^{b}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn gauss3_is_degree_five_exact() {
        for k in 0..=5 {
            let q: f64 = gauss3().iter().map(|(t, w)| w * t.powi(k)).sum();
            assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let r = adaptive_gk15(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 2000);
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_smooth_is_fast() {
        let r = adaptive_gk15(f64::cos, 0.0, 1.0, 1e-13, 100);
        assert!((r.value - 1f64.sin()).abs() < 1e-14);
        assert!(r.evaluations <= 45);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }
}
