#![allow(dead_code)]

use onelevel_core::{PiecewiseFunction, TrigPiece, TrigTerm};
use rand::Rng;

/// Even function on `[-sigma, sigma]` from its right half: interior cuts in
/// `(0, sigma)` and one piece per half-interval. The central piece only
/// keeps cosine terms with zero phase so it is even on its own.
pub fn even_from_half(sigma: f64, cuts: &[f64], half: &[TrigPiece]) -> PiecewiseFunction {
    assert_eq!(half.len(), cuts.len() + 1);
    let mut right = vec![0.0];
    right.extend_from_slice(cuts);
    right.push(sigma);
    if cuts.is_empty() {
        return PiecewiseFunction::new(vec![-sigma, sigma], vec![half[0].clone()], true).unwrap();
    }
    let mut bps: Vec<f64> = right[1..].iter().rev().map(|x| -x).collect();
    bps.extend_from_slice(&right[1..]);
    let mut pieces: Vec<TrigPiece> = half[1..].iter().rev().map(|p| p.mirrored()).collect();
    pieces.extend_from_slice(half);
    PiecewiseFunction::new(bps, pieces, true).unwrap()
}

fn random_piece<R: Rng>(rng: &mut R, central: bool) -> TrigPiece {
    let mut terms = vec![TrigTerm::constant(rng.random_range(-1.0..1.0))];
    for _ in 0..rng.random_range(0..3) {
        let amp = rng.random_range(-1.0..1.0);
        let freq = rng.random_range(0.0..4.0);
        let phase = if central { 0.0 } else { rng.random_range(-3.0..3.0) };
        terms.push(TrigTerm::cos(amp, freq, phase));
    }
    TrigPiece::new(terms)
}

/// Random even piecewise trigonometric function supported in `[-sigma, sigma]`.
pub fn random_even<R: Rng>(rng: &mut R, sigma: f64) -> PiecewiseFunction {
    let k = rng.random_range(0..4);
    let mut cuts: Vec<f64> = (0..k).map(|_| rng.random_range(0.02..0.98) * sigma).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let half: Vec<TrigPiece> = (0..=cuts.len()).map(|i| random_piece(rng, i == 0)).collect();
    even_from_half(sigma, &cuts, &half)
}

/// Random piecewise trigonometric function on `[-sigma, sigma]` with no
/// symmetry.
pub fn random_general<R: Rng>(rng: &mut R, sigma: f64) -> PiecewiseFunction {
    let k = rng.random_range(0..5);
    let mut bps: Vec<f64> = (0..k).map(|_| rng.random_range(-0.98..0.98) * sigma).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    bps.insert(0, -sigma);
    bps.push(sigma);
    let pieces = (1..bps.len()).map(|_| random_piece(rng, false)).collect();
    PiecewiseFunction::new(bps, pieces, false).unwrap()
}
