//! Gauss–Kronrod (7, 15) quadrature, fixed-panel and globally adaptive.
//!
//! The adaptive driver is the validation backend for the closed-form
//! integrals in [`crate::piecewise`]; the fixed composite rule is used where
//! the integrand is known to be analytic between supplied panel boundaries.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default subdivision budget for [`adaptive`].
pub const DEFAULT_BUDGET: usize = 4000;

/// One GK15 application on `[a, b]`: returns `(kronrod, |kronrod - gauss|)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Sorted, deduplicated panel boundaries: `a`, every `points` entry strictly
/// inside `(a, b)`, then `b`.
pub fn panel_edges(a: f64, b: f64, points: &[f64]) -> Vec<f64> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = points.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    edges
}

/// Globally adaptive GK15 on `[a, b]`, starting from panels split at
/// `points`. Bisects the worst segment until the summed error estimate is
/// at most `tol`, or fails once `budget` segments exist.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    points: &[f64],
    tol: f64,
    budget: usize,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return adaptive(f, b, a, points, tol, budget).map(|v| -v);
    }

    let edges = panel_edges(a, b, points);
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        heap.push(Segment { a: w[0], b: w[1], value, error });
    }

    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= tol {
            // Sum smallest contributions first.
            let mut values: Vec<f64> = heap.iter().map(|s| s.value).collect();
            values.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            return Ok(values.iter().sum());
        }
        if heap.len() >= budget {
            return Err(Error::QuadratureBudget { budget, estimate: total_error });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Segment can no longer be split in floating point.
            return Err(Error::QuadratureBudget { budget: heap.len() + 1, estimate: total_error });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi);
            heap.push(Segment { a: lo, b: hi, value, error });
        }
    }
}

/// Composite GK15 over the panels delimited by `points`, with every panel
/// further cut into pieces no longer than `max_width`. Suited to integrands
/// that are analytic between the supplied points.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, points: &[f64], max_width: f64) -> f64 {
    if a >= b {
        return if a == b { 0.0 } else { -composite(f, b, a, points, max_width) };
    }
    let edges = panel_edges(a, b, points);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let len = w[1] - w[0];
        let pieces = (len / max_width).ceil().max(1.0) as usize;
        let step = len / pieces as f64;
        for k in 0..pieces {
            let lo = w[0] + step * k as f64;
            let hi = if k + 1 == pieces { w[1] } else { lo + step };
            total += gk15(&f, lo, hi).0;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk15_is_exact_for_polynomials() {
        // Kronrod-15 integrates degree <= 22 exactly.
        let (v, _) = gk15(&|x: f64| x.powi(10) - 3.0 * x.powi(3), 0.0, 2.0);
        let exact = 2f64.powi(11) / 11.0 - 3.0 * 2f64.powi(4) / 4.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_jump_at_point() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v = adaptive(f, 0.0, 1.0, &[0.3], 1e-12, DEFAULT_BUDGET).unwrap();
        assert!((v - (0.3 + 1.4)).abs() < 1e-13);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        // Jump not announced as a breakpoint and a tiny budget.
        let f = |x: f64| if x < 1.0 / 3.0 { 0.0 } else { 1.0 };
        let err = adaptive(f, 0.0, 1.0, &[], 1e-14, 8).unwrap_err();
        assert!(matches!(err, Error::QuadratureBudget { budget: 8, .. }));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let f = |x: f64| x.exp();
        let fwd = adaptive(f, 0.0, 1.0, &[], 1e-13, DEFAULT_BUDGET).unwrap();
        let back = adaptive(f, 1.0, 0.0, &[], 1e-13, DEFAULT_BUDGET).unwrap();
        assert_eq!(fwd, -back);
        assert!((composite(f, 0.0, 1.0, &[], 0.5) - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        assert!(adaptive(|x| x, 0.0, 1.0, &[], 0.0, 10).is_err());
    }
}
