//! Construction of the optimal `g` for `sigma` in `[1, 1.5]`.
//!
//! On `[0, sigma]` the optimal function lives on three intervals
//! `J1 = [0, sigma-1]`, `J2 = [sigma-1, 2-sigma]`, `J3 = [2-sigma, sigma]`:
//!
//! * `J1`: `c1 cos(x/sqrt2)`
//! * `J2`: `cos(x/2 - (pi+1)/4)` for SO(even), `cos(x/2 + (pi-1)/4)` for SO(odd) and Sp
//! * `J3`: `±(c1/sqrt2) sin((x-1)/sqrt2) + c3` (`+` for SO(even))
//!
//! extended evenly and multiplied by `lambda` so that `(I + K) g = 1`. The
//! `J1` sine coefficient `c2` is identically zero. For O the optimal `g`
//! is the constant `1/(1+sigma)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use faer::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{apply_k_with, Group, KernelSpec};
use crate::piecewise::{symmetric_grid, PiecewiseFunction, TrigPiece, TrigTerm};

pub const SIGMA_MIN: f64 = 1.0;
pub const SIGMA_MAX: f64 = 1.5;

/// Below this `|det|` the coefficient system counts as singular.
pub const SINGULAR_DET: f64 = 1e-14;
/// Below this `|(I+K) g~ (0)|` no scale factor exists.
pub const LAMBDA_DENOMINATOR_MIN: f64 = 1e-12;

pub fn check_sigma(sigma: f64) -> Result<()> {
    if (SIGMA_MIN..=SIGMA_MAX).contains(&sigma) {
        Ok(())
    } else {
        Err(Error::SigmaOutOfRange(sigma))
    }
}

fn check_kernel_group(group: Group) -> Result<KernelSpec> {
    group.kernel()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// A constructed optimal function and the data it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOptimalG")]
pub struct OptimalG {
    pub group: Group,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub lambda: f64,
    pub f: PiecewiseFunction,
}

#[derive(Deserialize)]
struct RawOptimalG {
    group: Group,
    sigma: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    lambda: f64,
    f: PiecewiseFunction,
}

impl TryFrom<RawOptimalG> for OptimalG {
    type Error = Error;

    fn try_from(raw: RawOptimalG) -> Result<Self> {
        check_kernel_group(raw.group)?;
        check_sigma(raw.sigma)?;
        if raw.f.sigma() != raw.sigma {
            return Err(Error::Mismatch(format!(
                "function support {} differs from sigma {}",
                raw.f.sigma(),
                raw.sigma
            )));
        }
        Ok(OptimalG {
            group: raw.group,
            sigma: raw.sigma,
            c1: raw.c1,
            c2: raw.c2,
            c3: raw.c3,
            lambda: raw.lambda,
            f: raw.f,
        })
    }
}

impl OptimalG {
    pub fn coefficients(&self) -> Coefficients {
        Coefficients { c1: self.c1, c2: self.c2, c3: self.c3 }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.f.evaluate(x)
    }
}

/// Unscaled `J2` formula on `x >= 0`.
pub fn middle_piece(group: Group) -> Result<TrigPiece> {
    let phase = match group {
        Group::SOeven => -(PI + 1.0) / 4.0,
        Group::SOodd | Group::Sp => (PI - 1.0) / 4.0,
        Group::O => return Ok(TrigPiece::constant(1.0)),
        Group::U => return Err(Error::UnsupportedGroup(group)),
    };
    Ok(TrigPiece::new(vec![TrigTerm::cos(1.0, 0.5, phase)]))
}

fn middle_value(group: Group, x: f64) -> Result<f64> {
    Ok(middle_piece(group)?.eval(x))
}

/// `cos((sigma-1)/sqrt2) * sin((sigma-1)/sqrt2)`, the determinant of both
/// coefficient systems.
pub fn determinant(sigma: f64) -> f64 {
    let a = (sigma - 1.0) * FRAC_1_SQRT_2;
    a.cos() * a.sin()
}

/// Closed-form coefficients for SO(even), SO(odd) and Sp. O returns the
/// unit constant `(1, 0, 1)`.
pub fn closed_form_coefficients(group: Group, sigma: f64) -> Result<Coefficients> {
    check_sigma(sigma)?;
    let a = (sigma - 1.0) * FRAC_1_SQRT_2;
    let (sec, tan) = (1.0 / a.cos(), a.tan());
    let (c1, c3) = match group {
        Group::SOeven => (
            ((sigma - 1.0) / 2.0 + (-1.0 - PI) / 4.0).cos() * sec,
            ((2.0 * sigma + 3.0 * PI - 3.0) / 4.0).sin()
                + ((-2.0 * sigma + 3.0 * PI + 3.0) / 4.0).sin() * tan / SQRT_2,
        ),
        Group::SOodd | Group::Sp => (
            ((1.0 - sigma) / 2.0 + (1.0 - PI) / 4.0).cos() * sec,
            ((-2.0 * sigma + 3.0 * PI + 3.0) / 4.0).sin()
                - ((2.0 * sigma + 3.0 * PI - 3.0) / 4.0).sin() * tan / SQRT_2,
        ),
        Group::O => (1.0, 1.0),
        Group::U => return Err(Error::UnsupportedGroup(group)),
    };
    Ok(Coefficients { c1, c2: 0.0, c3 })
}

/// The 3x3 system fixing `(c1, c2, c3)`: continuity at `sigma - 1` and
/// constancy of `(I + K) g~` across the three intervals. Rows are
/// `(matrix row, rhs)`.
pub fn coefficient_system(group: Group, sigma: f64) -> Result<([[f64; 3]; 3], [f64; 3])> {
    check_sigma(sigma)?;
    let sign = match group {
        Group::SOeven => 1.0,
        Group::SOodd | Group::Sp => -1.0,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no coefficient system for group {group}"
            )))
        }
    };
    let a = (sigma - 1.0) * FRAC_1_SQRT_2;
    let (c, s) = (a.cos(), a.sin());
    let matrix = [
        [c, s, 0.0],
        [c, 0.0, 0.0],
        [sign * s * FRAC_1_SQRT_2 + c, sign * (SQRT_2 - c * FRAC_1_SQRT_2), -1.0],
    ];
    let left = middle_value(group, sigma - 1.0)?;
    let right = middle_value(group, 2.0 - sigma)?;
    Ok((matrix, [left, left, left - right]))
}

/// Solves [`coefficient_system`] by LU. At `sigma = 1` the system is
/// singular and the closed-form limit is returned.
pub fn solve_coefficient_matrix(group: Group, sigma: f64) -> Result<Coefficients> {
    let (m, rhs) = coefficient_system(group, sigma)?;
    if sigma == SIGMA_MIN {
        return closed_form_coefficients(group, sigma);
    }
    let det = determinant(sigma);
    if det.abs() < SINGULAR_DET {
        return Err(Error::SingularSystem(det));
    }
    let a = Mat::<f64>::from_fn(3, 3, |i, j| m[i][j]);
    let b = Mat::<f64>::from_fn(3, 1, |i, _| rhs[i]);
    let x = a.partial_piv_lu().solve(&b);
    Ok(Coefficients { c1: x[(0, 0)], c2: x[(1, 0)], c3: x[(2, 0)] })
}

/// Five candidate `(a, b, piece)` regions tiling `[-sigma, sigma]`; regions
/// that collapse at the ends of the sigma range are dropped.
fn assemble(group: Group, sigma: f64, coeffs: Coefficients, scale: f64) -> Result<PiecewiseFunction> {
    if group == Group::O {
        return PiecewiseFunction::constant(scale * coeffs.c1, sigma);
    }
    let sign = match group {
        Group::SOeven => 1.0,
        _ => -1.0,
    };
    let inner = TrigPiece::new(vec![TrigTerm::cos(coeffs.c1, FRAC_1_SQRT_2, 0.0)]).scaled(scale);
    let middle = middle_piece(group)?.scaled(scale);
    let outer = TrigPiece::new(vec![
        TrigTerm::sin(sign * coeffs.c1 * FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        TrigTerm::constant(coeffs.c3),
    ])
    .scaled(scale);

    let (j1, j2) = (sigma - 1.0, 2.0 - sigma);
    let regions = [
        (-sigma, -j2, outer.mirrored()),
        (-j2, -j1, middle.mirrored()),
        (-j1, j1, inner),
        (j1, j2, middle),
        (j2, sigma, outer),
    ];
    let kept: Vec<_> = regions.into_iter().filter(|(a, b, _)| b > a).collect();
    let mut breakpoints = vec![kept[0].0];
    breakpoints.extend(kept.iter().map(|r| r.1));
    let pieces = kept.into_iter().map(|r| r.2).collect();
    PiecewiseFunction::new(breakpoints, pieces, true)
}

/// The unscaled `g~` (`lambda = 1`).
pub fn unscaled_g(group: Group, sigma: f64) -> Result<PiecewiseFunction> {
    check_kernel_group(group)?;
    let coeffs = closed_form_coefficients(group, sigma)?;
    assemble(group, sigma, coeffs, 1.0)
}

fn lambda_of(kernel: &KernelSpec, sigma: f64, unscaled: &PiecewiseFunction) -> Result<f64> {
    let denom = unscaled.evaluate(0.0) + apply_k_with(kernel, sigma, unscaled, 0.0);
    if denom.abs() < LAMBDA_DENOMINATOR_MIN {
        return Err(Error::Construction(format!(
            "(I+K) g~ (0) = {denom:e} is too small to normalise"
        )));
    }
    Ok(1.0 / denom)
}

/// `1 / ((I + K) g~)(0)`.
pub fn compute_lambda(group: Group, sigma: f64) -> Result<f64> {
    let kernel = check_kernel_group(group)?;
    let unscaled = unscaled_g(group, sigma)?;
    lambda_of(&kernel, sigma, &unscaled)
}

pub fn build_optimal_g(group: Group, sigma: f64) -> Result<OptimalG> {
    let kernel = check_kernel_group(group)?;
    check_sigma(sigma)?;
    let coeffs = closed_form_coefficients(group, sigma)?;
    let unscaled = assemble(group, sigma, coeffs, 1.0)?;
    let lambda = lambda_of(&kernel, sigma, &unscaled)?;
    let f = assemble(group, sigma, coeffs, lambda)?;
    Ok(OptimalG {
        group,
        sigma,
        c1: coeffs.c1,
        c2: coeffs.c2,
        c3: coeffs.c3,
        lambda,
        f,
    })
}

/// Evaluation points for criterion checks: `grid_size` uniform points on
/// `[-sigma, sigma]` plus every breakpoint of `f`.
pub fn criterion_points(sigma: f64, f: &PiecewiseFunction, grid_size: usize) -> Vec<f64> {
    let mut xs = symmetric_grid(sigma, grid_size);
    xs.extend_from_slice(f.breakpoints());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// `max |f(x) + (K f)(x) - 1|` over [`criterion_points`].
pub fn criterion_residual(group: Group, sigma: f64, f: &PiecewiseFunction, grid_size: usize) -> Result<f64> {
    let kernel = check_kernel_group(group)?;
    if grid_size < 2 {
        return Err(Error::InvalidArgument("grid size must be at least 2".into()));
    }
    Ok(criterion_points(sigma, f, grid_size)
        .into_iter()
        .map(|x| (f.evaluate(x) + apply_k_with(&kernel, sigma, f, x) - 1.0).abs())
        .fold(0.0, f64::max))
}

pub fn verify_criterion(og: &OptimalG, grid_size: usize) -> Result<f64> {
    criterion_residual(og.group, og.sigma, &og.f, grid_size)
}

/// Finite-difference residuals of the delay equations satisfied by `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeResiduals {
    /// `max |g'(x) + a2 g(x+1) - a2 g(1-x)|` for `x` inside `J1 ∪ -J1`.
    pub inner: f64,
    /// `max |g'(x+1) - a2 g(x)|` for `x+1` inside `J2` or `J3`.
    pub outer: f64,
}

impl OdeResiduals {
    pub fn max(&self) -> f64 {
        self.inner.max(self.outer)
    }
}

pub const ODE_STEP: f64 = 1e-5;
pub const ODE_SAMPLES: usize = 50;

/// `samples` midpoints of `(a, b)`, keeping `margin` clear of both ends.
fn interior_samples(a: f64, b: f64, samples: usize, margin: f64) -> Vec<f64> {
    (0..samples)
        .map(|k| a + (b - a) * (k as f64 + 0.5) / samples as f64)
        .filter(|&x| x - a > margin && b - x > margin)
        .collect()
}

/// Central differences with step `h`; sample points stay `4h` away from
/// every breakpoint.
pub fn delay_ode_residuals(og: &OptimalG, h: f64, samples: usize) -> Result<OdeResiduals> {
    let alpha2 = check_kernel_group(og.group)?.alpha2();
    let g = |x: f64| og.f.evaluate(x);
    let dg = |x: f64| (g(x + h) - g(x - h)) / (2.0 * h);
    let margin = 4.0 * h;
    let sigma = og.sigma;

    let j1 = sigma - 1.0;
    let inner = interior_samples(-j1, j1, samples, margin)
        .into_iter()
        .map(|x| (dg(x) + alpha2 * g(x + 1.0) - alpha2 * g(1.0 - x)).abs())
        .fold(0.0, f64::max);

    let mut outer = 0.0_f64;
    for (a, b) in [(sigma - 1.0, 2.0 - sigma), (2.0 - sigma, sigma)] {
        for y in interior_samples(a, b, samples, margin) {
            outer = outer.max((dg(y) - alpha2 * g(y - 1.0)).abs());
        }
    }
    Ok(OdeResiduals { inner, outer })
}

/// Least-squares fit of `g = t * cos(a2 x - (pi + 2 a2)/4)` on the interior
/// of `J2`; returns `(t, max residual)`, or `None` when `J2` is degenerate.
pub fn middle_shape_fit(og: &OptimalG, samples: usize) -> Result<Option<(f64, f64)>> {
    let alpha2 = check_kernel_group(og.group)?.alpha2();
    let shape = |x: f64| (alpha2 * x - (PI + 2.0 * alpha2) / 4.0).cos();
    let xs = interior_samples(og.sigma - 1.0, 2.0 - og.sigma, samples, 1e-9);
    if xs.is_empty() {
        return Ok(None);
    }
    let (num, den) = xs.iter().fold((0.0, 0.0), |(n, d), &x| {
        let u = shape(x);
        (n + og.f.evaluate(x) * u, d + u * u)
    });
    let t = num / den;
    let worst = xs
        .iter()
        .map(|&x| (og.f.evaluate(x) - t * shape(x)).abs())
        .fold(0.0, f64::max);
    Ok(Some((t, worst)))
}
