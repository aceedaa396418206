//! Even, compactly supported piecewise trigonometric functions.
//!
//! A [`PiecewiseFunction`] is a sum of terms `amp * cos(freq * x + phase)` on
//! each subinterval of `[-sigma, sigma]` and zero outside. Constants are
//! terms with `freq == 0`, sines carry `phase = -pi/2`. The family is closed
//! under products, shifts and reflections, so every integral the rest of the
//! crate needs (`<f, g>`, autocorrelations, cosine transforms) reduces to
//! per-piece antiderivatives.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// `amp * cos(freq * x + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amp: f64,
    pub freq: f64,
    pub phase: f64,
}

impl TrigTerm {
    pub fn constant(value: f64) -> Self {
        Self { amp: value, freq: 0.0, phase: 0.0 }
    }

    pub fn cos(amp: f64, freq: f64, phase: f64) -> Self {
        Self { amp, freq, phase }
    }

    /// `amp * sin(freq * x + phase)`.
    pub fn sin(amp: f64, freq: f64, phase: f64) -> Self {
        Self { amp, freq, phase: phase - FRAC_PI_2 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.amp * (self.freq * x + self.phase).cos()
    }

    /// Exact integral over `[a, b]`.
    ///
    /// Written as `2 amp cos(freq m + phase) sin(freq h) / freq` with midpoint
    /// `m` and half-width `h`, which stays accurate as `freq -> 0`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let wh = self.freq * h;
        let sinc_h = if wh.abs() < 1e-8 {
            h * (1.0 - wh * wh / 6.0)
        } else {
            wh.sin() / self.freq
        };
        2.0 * self.amp * (self.freq * m + self.phase).cos() * sinc_h
    }

    /// Product-to-sum: the two terms whose sum equals `self * other`.
    pub fn product(&self, other: &TrigTerm) -> [TrigTerm; 2] {
        let amp = 0.5 * self.amp * other.amp;
        [
            TrigTerm::cos(amp, self.freq + other.freq, self.phase + other.phase),
            TrigTerm::cos(amp, self.freq - other.freq, self.phase - other.phase),
        ]
    }
}

/// The formula used on one subinterval of a [`PiecewiseFunction`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPiece {
    pub terms: Vec<TrigTerm>,
}

impl TrigPiece {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(vec![TrigTerm::constant(value)])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.terms.iter().map(|t| t.integral(a, b)).sum()
    }

    /// Exact derivative.
    pub fn derivative(&self) -> TrigPiece {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.freq != 0.0)
            .map(|t| TrigTerm::cos(-t.amp * t.freq, t.freq, t.phase - FRAC_PI_2))
            .collect();
        TrigPiece::new(terms)
    }

    pub fn product(&self, other: &TrigPiece) -> TrigPiece {
        let mut terms = Vec::with_capacity(2 * self.terms.len() * other.terms.len());
        for s in &self.terms {
            for o in &other.terms {
                terms.extend(s.product(o));
            }
        }
        TrigPiece::new(terms)
    }

    /// The piece `x -> self(x - shift)`.
    pub fn shifted(&self, shift: f64) -> TrigPiece {
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm::cos(t.amp, t.freq, t.phase - t.freq * shift))
            .collect();
        TrigPiece::new(terms)
    }

    /// The piece `x -> self(-x)`.
    pub fn mirrored(&self) -> TrigPiece {
        let terms = self.terms.iter().map(|t| TrigTerm::cos(t.amp, -t.freq, t.phase)).collect();
        TrigPiece::new(terms)
    }

    pub fn scaled(&self, factor: f64) -> TrigPiece {
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm::cos(t.amp * factor, t.freq, t.phase))
            .collect();
        TrigPiece::new(terms)
    }

    pub fn sum(&self, other: &TrigPiece) -> TrigPiece {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        TrigPiece::new(terms)
    }
}

/// A compactly supported function on `[-sigma, sigma]`, given by one
/// [`TrigPiece`] per subinterval between consecutive breakpoints.
///
/// At an interior breakpoint the piece to the right is used; at `sigma`
/// itself the last piece is used; outside the support the value is 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise")]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<TrigPiece>,
    sigma: f64,
    even: bool,
}

#[derive(Deserialize)]
struct RawPiecewise {
    breakpoints: Vec<f64>,
    pieces: Vec<TrigPiece>,
    sigma: f64,
    even: bool,
}

impl TryFrom<RawPiecewise> for PiecewiseFunction {
    type Error = Error;

    fn try_from(raw: RawPiecewise) -> Result<Self> {
        let f = PiecewiseFunction::new(raw.breakpoints, raw.pieces, raw.even)?;
        if f.sigma != raw.sigma {
            return Err(Error::InvalidPiecewise(format!(
                "sigma {} does not match the last breakpoint {}",
                raw.sigma, f.sigma
            )));
        }
        Ok(f)
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

impl PiecewiseFunction {
    /// Validates and builds a function whose support is
    /// `[breakpoints[0], breakpoints[last]] = [-sigma, sigma]`.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<TrigPiece>, even: bool) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPiecewise("need at least two breakpoints".into()));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidPiecewise(format!(
                "{} breakpoints cannot carry {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidPiecewise("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPiecewise("breakpoints must be strictly increasing".into()));
        }
        let sigma = *breakpoints.last().unwrap();
        let tol = SYMMETRY_TOL * sigma.abs().max(1.0);
        if sigma <= 0.0 || (breakpoints[0] + sigma).abs() > tol {
            return Err(Error::InvalidPiecewise(format!(
                "support [{}, {}] is not of the form [-sigma, sigma]",
                breakpoints[0], sigma
            )));
        }
        if pieces.iter().flat_map(|p| &p.terms).any(|t| {
            !(t.amp.is_finite() && t.freq.is_finite() && t.phase.is_finite())
        }) {
            return Err(Error::InvalidPiecewise("term parameters must be finite".into()));
        }
        if even {
            let n = breakpoints.len();
            for i in 0..n {
                if (breakpoints[i] + breakpoints[n - 1 - i]).abs() > tol {
                    return Err(Error::InvalidPiecewise(
                        "an even function needs breakpoints symmetric about 0".into(),
                    ));
                }
            }
        }
        Ok(Self { breakpoints, pieces, sigma, even })
    }

    /// The constant `value` on `[-sigma, sigma]`.
    pub fn constant(value: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![-sigma, sigma], vec![TrigPiece::constant(value)], true)
    }

    pub fn zero(sigma: f64) -> Result<Self> {
        Self::constant(0.0, sigma)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[TrigPiece] {
        &self.pieces
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Domain `[a, b]` of piece `i`.
    pub fn piece_domain(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    /// Iterator over `(a, b, piece)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &TrigPiece)> + '_ {
        self.breakpoints.windows(2).zip(&self.pieces).map(|(w, p)| (w[0], w[1], p))
    }

    fn piece_index(&self, x: f64) -> usize {
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if !(x >= self.breakpoints[0] && x <= self.sigma) {
            return 0.0;
        }
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Exact integral over `[a, b]` clipped to the support. Reversed limits
    /// flip the sign.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        if a > b {
            return -self.integrate(b, a);
        }
        let lo = a.max(self.breakpoints[0]);
        let hi = b.min(self.sigma);
        if lo >= hi {
            return 0.0;
        }
        self.segments()
            .filter_map(|(pa, pb, piece)| {
                let (u, v) = (pa.max(lo), pb.min(hi));
                (u < v).then(|| piece.integral(u, v))
            })
            .sum()
    }

    /// Adaptive GK15 integral of [`Self::evaluate`] with the breakpoints as
    /// panel boundaries. Independent of the closed-form path.
    pub fn quadrature_check(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        self.quadrature_check_with_budget(a, b, tol, quadrature::DEFAULT_BUDGET)
    }

    pub fn quadrature_check_with_budget(&self, a: f64, b: f64, tol: f64, budget: usize) -> Result<f64> {
        let lo = a.min(b).max(self.breakpoints[0]);
        let hi = a.max(b).min(self.sigma);
        if lo >= hi {
            return Ok(0.0);
        }
        let v = quadrature::adaptive(|x| self.evaluate(x), lo, hi, &self.breakpoints, tol, budget)?;
        Ok(if a > b { -v } else { v })
    }

    /// `integral f(t) * other(t - shift) dt` over the overlap of the supports,
    /// evaluated exactly on the common refinement of both breakpoint sets.
    pub fn correlate(&self, other: &PiecewiseFunction, shift: f64) -> f64 {
        let lo = self.breakpoints[0].max(other.breakpoints[0] + shift);
        let hi = self.sigma.min(other.sigma + shift);
        if lo >= hi {
            return 0.0;
        }
        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .chain(other.breakpoints.iter().map(|b| b + shift))
            .filter(|&c| c > lo && c < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut total = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let p = &self.pieces[self.piece_index(mid)];
            let q = other.pieces[other.piece_index(mid - shift)].shifted(shift);
            total += p.product(&q).integral(w[0], w[1]);
        }
        total
    }

    /// `<self, other>` on the real line.
    pub fn inner(&self, other: &PiecewiseFunction) -> f64 {
        self.correlate(other, 0.0)
    }

    /// `integral f(t) * weight(t) dt` over `[a, b]` clipped to the support.
    pub fn integrate_weighted(&self, weight: &TrigPiece, a: f64, b: f64) -> f64 {
        let lo = a.max(self.breakpoints[0]);
        let hi = b.min(self.sigma);
        if lo >= hi {
            return 0.0;
        }
        self.segments()
            .filter_map(|(pa, pb, piece)| {
                let (u, v) = (pa.max(lo), pb.min(hi));
                (u < v).then(|| piece.product(weight).integral(u, v))
            })
            .sum()
    }

    /// Same breakpoints, every piece multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> PiecewiseFunction {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|p| p.scaled(factor)).collect(),
            sigma: self.sigma,
            even: self.even,
        }
    }

    /// Pointwise sum with a function on the same support, on the union of
    /// both breakpoint sets. Evenness is kept only if both are even.
    pub fn add(&self, other: &PiecewiseFunction) -> Result<PiecewiseFunction> {
        if (self.sigma - other.sigma).abs() > SYMMETRY_TOL * self.sigma.max(1.0) {
            return Err(Error::Mismatch(format!(
                "cannot add functions supported on sigma = {} and {}",
                self.sigma, other.sigma
            )));
        }
        let mut bps: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup_by(|a, b| (*a - *b).abs() <= SYMMETRY_TOL * self.sigma.max(1.0));
        // Keep this function's exact end points.
        *bps.first_mut().unwrap() = self.breakpoints[0];
        *bps.last_mut().unwrap() = self.sigma;
        let pieces = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.pieces[self.piece_index(mid)].sum(&other.pieces[other.piece_index(mid)])
            })
            .collect();
        PiecewiseFunction::new(bps, pieces, self.even && other.even)
    }

    /// Largest `|left(b) - right(b)|` over interior breakpoints `b`, with
    /// both pieces evaluated by formula at `b`.
    pub fn max_breakpoint_jump(&self) -> f64 {
        self.pieces
            .windows(2)
            .zip(&self.breakpoints[1..])
            .map(|(p, &b)| (p[0].eval(b) - p[1].eval(b)).abs())
            .fold(0.0, f64::max)
    }

    /// `n` equally spaced points covering `[-sigma, sigma]` symmetrically.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        symmetric_grid(self.sigma, n)
    }

    /// CSV with header `x,g` sampled on `n` points of `[-sigma, sigma]`.
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from("x,g\n");
        for x in self.grid(n) {
            writeln!(out, "{},{}", fmt_f64(x), fmt_f64(self.evaluate(x))).unwrap();
        }
        out
    }
}

/// `n >= 2` points on `[-half_width, half_width]`, exactly mirror-symmetric.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let j = n - 1 - i;
            if i < j {
                -half_width * (1.0 - 2.0 * i as f64 / last)
            } else if i == j {
                0.0
            } else {
                half_width * (1.0 - 2.0 * j as f64 / last)
            }
        })
        .collect()
}

/// 17 significant digits, the rendering used in every CSV this crate writes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
