//! Rank bounds derived from `g`, and the test function `phi` itself.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{nystrom_solve, oracle_discrepancy, NystromConfig};
use crate::kernels::{apply_k_with, Group};
use crate::optimal::{build_optimal_g, check_sigma, verify_criterion, OptimalG};
use crate::piecewise::{fmt_f64, symmetric_grid, PiecewiseFunction, TrigPiece, TrigTerm};
use crate::quadrature::composite;

/// Panel width for the composite rules below. Every integrand is analytic
/// between the supplied breakpoints with frequencies below 2, so GK15 on
/// panels this narrow is exact to rounding.
const PANEL_WIDTH: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub group: Group,
    pub sigma: f64,
    pub optimal_bound: f64,
    pub corollary_bound: f64,
    pub naive_bound: f64,
    pub fourier_side_bound: f64,
    pub criterion_residual: f64,
    pub oracle_discrepancy: f64,
    pub grid_size: usize,
    pub nystrom_nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub grid_size: usize,
    pub nystrom_nodes: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { grid_size: 1001, nystrom_nodes: 1001 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSample {
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub y: Vec<f64>,
    pub phi_hat: Vec<f64>,
}

/// `1 / int g`.
pub fn infimum_bound(og: &OptimalG) -> Result<f64> {
    let total = og.f.integrate(-og.sigma, og.sigma);
    if !(total > 0.0) {
        return Err(Error::NonPositiveIntegral(total));
    }
    Ok(1.0 / total)
}

/// Closed-form average rank bound for `G` at support `sigma`.
pub fn corollary_bound(group: Group, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let s = sigma;
    let t = ((s - 1.0) / SQRT_2).tan();
    let a = ((3.0 - 2.0 * s) / 4.0).sin();
    let b = ((PI + 3.0 - 2.0 * s) / 4.0).sin();
    let c = ((PI - 3.0 + 2.0 * s) / 4.0).sin();
    let r2 = SQRT_2;
    let (num, den) = match group {
        Group::SOeven => (
            4.0 * r2 * a + 2.0 * (s - 1.0) * b + c * (r2 * (s + 1.0) * t + 2.0),
            8.0 * r2 * a + 8.0 * (s - 1.0) * b + 4.0 * r2 * s * c * t,
        ),
        Group::Sp => (
            -2.0 * (s - 1.0) * c - 4.0 * r2 * a + b * (r2 * (s - 3.0) * t + 2.0),
            8.0 * (s - 1.0) * c + 8.0 * r2 * a - 4.0 * r2 * (s - 2.0) * b * t,
        ),
        Group::SOodd => (
            6.0 * (s - 1.0) * c + 4.0 * r2 * a + b * (r2 * (5.0 - 3.0 * s) * t + 2.0),
            8.0 * (s - 1.0) * c + 8.0 * r2 * a - 4.0 * r2 * (s - 2.0) * b * t,
        ),
        Group::O => return Ok(1.0 / (2.0 * s) + 0.5),
        Group::U => return Err(Error::UnsupportedGroup(group)),
    };
    Ok(num / den)
}

/// Bound from the Fejer pair `phi^(y) = (1/2s)(1 - |y|/2s)` on `|y| < 2s`.
pub fn naive_bound(group: Group, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let d = group.density();
    let half = 2.0 * sigma;
    // int of the triangle over |y| < r.
    let mass = |r: f64| {
        let r = r.min(half);
        2.0 * (r - r * r / (2.0 * half)) / half
    };
    let at_zero = 1.0 / half;
    Ok(d.delta_coeff * at_zero + d.constant * mass(half) + d.eta_coeff * mass(1.0))
}

/// `R(g) = <(I + K) g, g> / <g, 1>^2` over `[-sigma, sigma]`.
///
/// `<g, g>` and `<g, 1>` are exact; `<Kg, g>` uses composite GK15 on panels
/// split wherever `Kg` has a kink, with `Kg` itself evaluated exactly.
pub fn functional_r(group: Group, sigma: f64, g: &PiecewiseFunction) -> Result<f64> {
    let kernel = group.kernel()?;
    if g.sigma() > sigma * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "g is supported on [-{}, {}], wider than sigma = {sigma}",
            g.sigma(),
            g.sigma()
        )));
    }
    let mean = g.integrate(-sigma, sigma);
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    let gg = g.inner(g);
    let mut points: Vec<f64> = Vec::new();
    for &b in g.breakpoints() {
        points.extend([b, b - 1.0, b + 1.0]);
    }
    let s = g.sigma();
    let kgg = composite(
        |x| g.evaluate(x) * apply_k_with(&kernel, sigma, g, x),
        -s,
        s,
        &points,
        PANEL_WIDTH,
    );
    Ok((gg + kgg) / (mean * mean))
}

/// `phi^(y) = int g(t) g(t - y) dt` at each `y`.
pub fn convolve_self(g: &PiecewiseFunction, ys: &[f64]) -> Vec<f64> {
    ys.iter().map(|&y| g.correlate(g, y)).collect()
}

/// `phi(x) = (int g(t) cos(2 pi x t) dt)^2`.
pub fn phi_value(g: &PiecewiseFunction, x: f64) -> f64 {
    let weight = TrigPiece::new(vec![TrigTerm::cos(1.0, 2.0 * PI * x, 0.0)]);
    let s = g.sigma();
    g.integrate_weighted(&weight, -s, s).powi(2)
}

/// `phi` on `[-x_max, x_max]` and `phi^` on `[-2 sigma, 2 sigma]`.
pub fn sample_phi(g: &PiecewiseFunction, x_max: f64, nx: usize, ny: usize) -> PhiSample {
    let x = symmetric_grid(x_max, nx);
    let y = symmetric_grid(2.0 * g.sigma(), ny);
    let phi = x.iter().map(|&t| phi_value(g, t)).collect();
    let phi_hat = convolve_self(g, &y);
    PhiSample { x, phi, y, phi_hat }
}

impl PhiSample {
    pub fn phi_csv(&self) -> String {
        let mut out = String::from("x,phi\n");
        for (x, p) in self.x.iter().zip(&self.phi) {
            writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*p)).unwrap();
        }
        out
    }

    pub fn phi_hat_csv(&self) -> String {
        let mut out = String::from("y,phi_hat\n");
        for (y, p) in self.y.iter().zip(&self.phi_hat) {
            writeln!(out, "{},{}", fmt_f64(*y), fmt_f64(*p)).unwrap();
        }
        out
    }
}

/// `[phi^(0) + int phi^ W_reg] / phi(0)` with `phi^ = g * g`.
pub fn fourier_side_bound(group: Group, og: &OptimalG) -> Result<f64> {
    let g = &og.f;
    let density = group.density();
    let span = 2.0 * g.sigma();
    let bps = g.breakpoints();
    let mut points = vec![-1.0, 1.0];
    for &a in bps {
        for &b in bps {
            points.push(a - b);
        }
    }
    let at_zero = g.correlate(g, 0.0);
    let regular = if density.constant == 0.0 && density.eta_coeff == 0.0 {
        0.0
    } else {
        composite(|y| g.correlate(g, y) * density.regular(y), -span, span, &points, PANEL_WIDTH)
    };
    let phi0 = phi_value(g, 0.0);
    if phi0 == 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok((density.delta_coeff * at_zero + regular) / phi0)
}

pub fn make_report(group: Group, sigma: f64) -> Result<BoundReport> {
    make_report_with(group, sigma, &ReportOptions::default())
}

pub fn make_report_with(group: Group, sigma: f64, opts: &ReportOptions) -> Result<BoundReport> {
    let og = build_optimal_g(group, sigma)?;
    let criterion_residual = verify_criterion(&og, opts.grid_size)?;
    let cfg = NystromConfig::new(opts.nystrom_nodes)?;
    let sampled = nystrom_solve(group, sigma, &cfg)?;
    Ok(BoundReport {
        group,
        sigma,
        optimal_bound: infimum_bound(&og)?,
        corollary_bound: corollary_bound(group, sigma)?,
        naive_bound: naive_bound(group, sigma)?,
        fourier_side_bound: fourier_side_bound(group, &og)?,
        criterion_residual,
        oracle_discrepancy: oracle_discrepancy(&og, &sampled)?,
        grid_size: opts.grid_size,
        nystrom_nodes: sampled.nodes.len(),
    })
}

/// `start, start + step, ...` up to `stop`, which is included when it lies
/// within half a step of the last point.
pub fn sigma_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::InvalidArgument(format!(
            "bad sigma range {start}:{stop}:{step}"
        )));
    }
    let count = ((stop - start) / step + 0.5).floor() as usize;
    let mut out: Vec<f64> = (0..=count).map(|k| start + k as f64 * step).collect();
    if let Some(last) = out.last_mut() {
        if (*last - stop).abs() <= 0.5 * step {
            *last = stop;
        }
    }
    Ok(out)
}

/// One report per `(group, sigma)`, in input order.
pub fn sweep(groups: &[Group], sigmas: &[f64], opts: &ReportOptions) -> Result<Vec<BoundReport>> {
    let jobs: Vec<(Group, f64)> =
        groups.iter().flat_map(|&g| sigmas.iter().map(move |&s| (g, s))).collect();
    jobs.par_iter().map(|&(g, s)| make_report_with(g, s, opts)).collect()
}

pub const SWEEP_HEADER: &str = "group,sigma,optimal_bound,naive_bound,corollary_bound,\
fourier_side_bound,criterion_residual,oracle_discrepancy";

pub fn sweep_csv(reports: &[BoundReport]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.group,
            fmt_f64(r.sigma),
            fmt_f64(r.optimal_bound),
            fmt_f64(r.naive_bound),
            fmt_f64(r.corollary_bound),
            fmt_f64(r.fourier_side_bound),
            fmt_f64(r.criterion_residual),
            fmt_f64(r.oracle_discrepancy)
        )
        .unwrap();
    }
    out
}
