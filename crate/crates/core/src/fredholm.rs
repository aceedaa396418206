//! Nystrom discretisation of `(I + K_{G,sigma}) g = 1`, used as an
//! independent oracle for the closed-form construction.
//!
//! The unknown is represented by its values at the nodes and integrated as
//! the piecewise-linear interpolant of those values. Each row of `K` is the
//! exact integral of that interpolant against `m_G(x_i - y)`, i.e. a
//! composite trapezoid rule whose panels are split at the kernel jumps
//! `y = x_i ± 1`. The node set is mirror-symmetric and contains the
//! interval ends `±(sigma-1)`, `±(2-sigma)`, so the solution is smooth on
//! every panel.

use std::fmt::Write as _;

use faer::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{Group, KernelSpec};
use crate::optimal::{check_sigma, OptimalG};
use crate::piecewise::fmt_f64;

pub const MIN_NODES: usize = 51;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    /// Trapezoid on the linear interpolant, panels split at kernel jumps.
    #[default]
    TrapezoidWithBreakpoints,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NystromConfig {
    /// Number of uniform nodes on `[-sigma, sigma]` before the interval
    /// ends are inserted. Rounded up to an odd count so 0 is a node.
    pub node_count: usize,
    pub rule: QuadratureRule,
}

impl NystromConfig {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "Nystrom node count must be at least {MIN_NODES}, got {node_count}"
            )));
        }
        Ok(Self { node_count, rule: QuadratureRule::TrapezoidWithBreakpoints })
    }
}

/// Values of a function at a set of nodes in `[-sigma, sigma]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub group: Group,
    pub sigma: f64,
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    /// `max |v(x) - v(-x)|` over mirrored node pairs.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|i| (self.values[i] - self.values[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// Trapezoid integral of the interpolant over `[-sigma, sigma]`.
    pub fn integral(&self) -> f64 {
        trapezoid_weights(&self.nodes)
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// CSV `x,g_nystrom,g_closed,diff` against a closed-form solution.
    pub fn comparison_csv(&self, og: &OptimalG) -> String {
        let mut out = String::from("x,g_nystrom,g_closed,diff\n");
        for (&x, &v) in self.nodes.iter().zip(&self.values) {
            let closed = og.evaluate(x);
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(x),
                fmt_f64(v),
                fmt_f64(closed),
                fmt_f64(v - closed)
            )
            .unwrap();
        }
        out
    }
}

/// Mirror-symmetric node set: the uniform grid plus `±(sigma-1)`,
/// `±(2-sigma)` and their images under `x -> x ± 1` that fall inside.
pub fn nodes(sigma: f64, cfg: &NystromConfig) -> Vec<f64> {
    let half_intervals = cfg.node_count.div_ceil(2).max(1);
    let step = sigma / half_intervals as f64;
    let mut half: Vec<f64> = (0..=half_intervals).map(|k| k as f64 * step).collect();
    *half.last_mut().unwrap() = sigma;

    let anchors = [sigma - 1.0, 2.0 - sigma];
    for p in anchors {
        for q in [p, p - 1.0, p + 1.0] {
            let q = q.abs();
            if q > 0.0 && q < sigma {
                half.push(q);
            }
        }
    }
    half.sort_by(f64::total_cmp);
    let merge = 1e-12 * sigma;
    half.dedup_by(|a, b| (*a - *b).abs() <= merge);

    let mut all: Vec<f64> = half[1..].iter().rev().map(|x| -x).collect();
    all.extend_from_slice(&half);
    all
}

/// Integrals of the hat functions over the node range.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = nodes[k + 1] - nodes[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    w
}

/// `int_{nodes[0]}^{t} hat_j` for all `j`, written into `out`.
/// Only hats `k` and `k+1` around `t` are partial.
fn cumulative_hats(nodes: &[f64], weights: &[f64], t: f64, out: &mut [f64]) {
    let n = nodes.len();
    let k = nodes.partition_point(|&x| x <= t).saturating_sub(1).min(n - 2);
    out[..k].copy_from_slice(&weights[..k]);
    out[k + 2..].fill(0.0);
    let h = nodes[k + 1] - nodes[k];
    let d = (t - nodes[k]).clamp(0.0, h);
    let left = if k > 0 { 0.5 * (nodes[k] - nodes[k - 1]) } else { 0.0 };
    out[k] = left + d - d * d / (2.0 * h);
    out[k + 1] = d * d / (2.0 * h);
}

/// The discrete operator `I + K` on `nodes` (row-major `n x n`).
pub fn assemble(kernel: &KernelSpec, nodes: &[f64]) -> Mat<f64> {
    let n = nodes.len();
    let sigma = nodes[n - 1];
    let weights = trapezoid_weights(nodes);
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut a = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let x = nodes[i];
        if kernel.indicator_coeff != 0.0 {
            cumulative_hats(nodes, &weights, (x + 1.0).min(sigma), &mut upper);
            cumulative_hats(nodes, &weights, (x - 1.0).max(-sigma), &mut lower);
        }
        for j in 0..n {
            let window = if kernel.indicator_coeff != 0.0 { upper[j] - lower[j] } else { 0.0 };
            let mut v = kernel.offset * weights[j] + kernel.indicator_coeff * window;
            if i == j {
                v += 1.0;
            }
            a[(i, j)] = v;
        }
    }
    a
}

/// Iterative refinement passes after the LU solve.
const REFINEMENT_STEPS: usize = 2;

/// `b - A x` with each row accumulated in doubled precision, so refinement
/// can drive the solve below the LU rounding level.
fn residual(a: &Mat<f64>, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let (mut hi, mut lo) = (b[i], 0.0);
            for (j, &xj) in x.iter().enumerate() {
                let p = -a[(i, j)] * xj;
                let perr = (-a[(i, j)]).mul_add(xj, -p);
                let s = hi + p;
                let t = s - hi;
                lo += (hi - (s - t)) + (p - t) + perr;
                hi = s;
            }
            hi + lo
        })
        .collect()
}

pub fn nystrom_solve(group: Group, sigma: f64, cfg: &NystromConfig) -> Result<SampledFunction> {
    let kernel = group.kernel()?;
    check_sigma(sigma)?;
    if cfg.node_count < MIN_NODES {
        return Err(Error::InvalidArgument(format!(
            "Nystrom node count must be at least {MIN_NODES}"
        )));
    }
    let xs = nodes(sigma, cfg);
    let n = xs.len();
    let a = assemble(&kernel, &xs);
    let lu = a.partial_piv_lu();
    let ones = vec![1.0; n];
    let rhs = Mat::<f64>::from_fn(n, 1, |_, _| 1.0);
    let sol = lu.solve(&rhs);
    let mut values: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
    for _ in 0..REFINEMENT_STEPS {
        let r = residual(&a, &values, &ones);
        let d = lu.solve(&Mat::<f64>::from_fn(n, 1, |i, _| r[i]));
        for (v, i) in values.iter_mut().zip(0..n) {
            *v += d[(i, 0)];
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Oracle("linear system is singular to working precision".into()));
    }
    Ok(SampledFunction { group, sigma, nodes: xs, values })
}

/// `max_i |s.values[i] - og(s.nodes[i])|`.
pub fn oracle_discrepancy(og: &OptimalG, s: &SampledFunction) -> Result<f64> {
    if og.group != s.group {
        return Err(Error::Mismatch(format!(
            "closed form is for {} but the samples are for {}",
            og.group, s.group
        )));
    }
    if og.sigma != s.sigma {
        return Err(Error::Mismatch(format!(
            "closed form has sigma {} but the samples have sigma {}",
            og.sigma, s.sigma
        )));
    }
    Ok(s.nodes
        .iter()
        .zip(&s.values)
        .map(|(&x, &v)| (v - og.evaluate(x)).abs())
        .fold(0.0, f64::max))
}

/// Discrete `R(v) = <(I+K) v, v> / <v, 1>^2` with trapezoid inner products.
pub fn discrete_functional_r(s: &SampledFunction) -> Result<f64> {
    let kernel = s.group.kernel()?;
    let a = assemble(&kernel, &s.nodes);
    let w = trapezoid_weights(&s.nodes);
    let n = s.nodes.len();
    let mut quad = 0.0;
    for i in 0..n {
        let av: f64 = (0..n).map(|j| a[(i, j)] * s.values[j]).sum();
        quad += w[i] * s.values[i] * av;
    }
    let mean: f64 = w.iter().zip(&s.values).map(|(w, v)| w * v).sum();
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok(quad / (mean * mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimal::build_optimal_g;

    #[test]
    fn config_rejects_tiny_grids() {
        assert!(NystromConfig::new(50).is_err());
        assert!(NystromConfig::new(51).is_ok());
    }

    #[test]
    fn node_set_is_symmetric_and_contains_interval_ends() {
        let cfg = NystromConfig::new(101).unwrap();
        let xs = nodes(1.23, &cfg);
        let n = xs.len();
        assert_eq!(xs[0], -1.23);
        assert_eq!(xs[n - 1], 1.23);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        for i in 0..n {
            assert_eq!(xs[i], -xs[n - 1 - i]);
        }
        for p in [0.23, 0.77, -0.23, -0.77, 0.0] {
            assert!(xs.iter().any(|&x| (x - p).abs() < 1e-12), "missing {p}");
        }
    }

    #[test]
    fn cumulative_hats_partition_the_integral() {
        let xs = [-1.0, -0.4, 0.1, 0.5, 1.0];
        let w = trapezoid_weights(&xs);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
        let mut out = [0.0; 5];
        for t in [-1.0, -0.7, 0.1, 0.3, 1.0] {
            cumulative_hats(&xs, &w, t, &mut out);
            // Hats sum to 1, so their cumulative integrals sum to t + 1.
            assert!((out.iter().sum::<f64>() - (t + 1.0)).abs() < 1e-15, "t = {t}");
        }
        cumulative_hats(&xs, &w, 1.0, &mut out);
        for (o, w) in out.iter().zip(&w) {
            assert!((o - w).abs() < 1e-15);
        }
    }

    #[test]
    fn orthogonal_solution_is_the_constant() {
        let s = nystrom_solve(Group::O, 1.2, &NystromConfig::new(201).unwrap()).unwrap();
        for v in &s.values {
            assert!((v - 1.0 / 2.2).abs() < 1e-6);
        }
        let og = build_optimal_g(Group::O, 1.2).unwrap();
        assert!(oracle_discrepancy(&og, &s).unwrap() <= 1e-6);
    }

    #[test]
    fn discrepancy_checks_metadata_and_detects_wrong_functions() {
        let cfg = NystromConfig::new(201).unwrap();
        let s = nystrom_solve(Group::Sp, 1.2, &cfg).unwrap();
        let wrong_group = build_optimal_g(Group::SOeven, 1.2).unwrap();
        assert!(matches!(oracle_discrepancy(&wrong_group, &s), Err(Error::Mismatch(_))));
        let wrong_sigma = build_optimal_g(Group::Sp, 1.25).unwrap();
        assert!(matches!(oracle_discrepancy(&wrong_sigma, &s), Err(Error::Mismatch(_))));

        let mut og = build_optimal_g(Group::Sp, 1.2).unwrap();
        assert!(oracle_discrepancy(&og, &s).unwrap() < 1e-3);
        og.f = crate::piecewise::PiecewiseFunction::constant(og.evaluate(0.0), 1.2).unwrap();
        assert!(oracle_discrepancy(&og, &s).unwrap() >= 0.01);
    }

    #[test]
    fn unsupported_inputs() {
        let cfg = NystromConfig::new(101).unwrap();
        assert!(nystrom_solve(Group::U, 1.2, &cfg).is_err());
        assert!(nystrom_solve(Group::O, 1.7, &cfg).is_err());
        let bad = NystromConfig { node_count: 3, rule: QuadratureRule::TrapezoidWithBreakpoints };
        assert!(nystrom_solve(Group::O, 1.2, &bad).is_err());
    }

    #[test]
    fn comparison_csv_has_one_row_per_node() {
        let s = nystrom_solve(Group::SOeven, 1.1, &NystromConfig::new(51).unwrap()).unwrap();
        let og = build_optimal_g(Group::SOeven, 1.1).unwrap();
        let csv = s.comparison_csv(&og);
        assert_eq!(csv.lines().count(), s.nodes.len() + 1);
        assert_eq!(csv.lines().next().unwrap(), "x,g_nystrom,g_closed,diff");
    }
}
