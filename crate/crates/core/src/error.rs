use thiserror::Error;

use crate::kernels::Group;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group {0} has no convolution kernel")]
    UnsupportedGroup(Group),

    #[error("sigma = {0} is outside the supported range [1, 1.5]")]
    SigmaOutOfRange(f64),

    #[error("invalid piecewise function: {0}")]
    InvalidPiecewise(String),

    #[error("adaptive quadrature did not converge within {budget} subdivisions (error estimate {estimate:e})")]
    QuadratureBudget { budget: usize, estimate: f64 },

    #[error("coefficient system is singular (determinant {0:e})")]
    SingularSystem(f64),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("Nystrom oracle failed: {0}")]
    Oracle(String),

    #[error("metadata mismatch: {0}")]
    Mismatch(String),

    #[error("integral of g is not positive ({0:e})")]
    NonPositiveIntegral(f64),

    #[error("test function has zero mean")]
    ZeroMean,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
