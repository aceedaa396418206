//! Optimal 1-level density test functions for the classical compact groups
//! with `supp(phi^)` in `[-2 sigma, 2 sigma]`, `1 <= sigma <= 1.5`, and the
//! upper bounds on average analytic rank they produce.
//!
//! * [`piecewise`]: exact piecewise trigonometric functions
//! * [`kernels`]: group kernels, the operator `K`, density transforms
//! * [`optimal`]: closed-form construction of the optimal `g`
//! * [`fredholm`]: Nystrom oracle for `(I + K) g = 1`
//! * [`analysis`]: rank bounds and the test function `phi`
//! * [`cli`]: the `onelevel` command-line driver

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod optimal;
pub mod piecewise;
pub mod quadrature;

pub use analysis::{BoundReport, PhiSample, ReportOptions};
pub use error::{Error, Result};
pub use fredholm::{NystromConfig, SampledFunction};
pub use kernels::{Group, KernelSpec, DensityFT};
pub use optimal::{build_optimal_g, OptimalG};
pub use piecewise::{PiecewiseFunction, TrigPiece, TrigTerm};
