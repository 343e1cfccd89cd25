use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and tests.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integral diverges: {0}")]
    NonIntegrable(String),

    #[error("quadrature did not converge (estimate {estimate:e}, error estimate {error_estimate:e})")]
    QuadratureFailed { estimate: f64, error_estimate: f64 },

    #[error("numeric inverse cdf failed: {0}")]
    InverseCdf(String),

    #[error("truncation tolerance {tolerance:e} not reached within {max_jumps} jumps")]
    TruncationNotReached { tolerance: f64, max_jumps: usize },

    #[error("stick-breaking deficit {deficit:e} still above {tolerance:e} after {sticks} sticks")]
    DeficitUnreachable { deficit: f64, tolerance: f64, sticks: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("sample size {got} outside the allowed range [{min}, {max}]")]
    SampleSize { got: usize, min: usize, max: usize },

    #[error("cdf is not monotone near x = {at}")]
    NonMonotoneCdf { at: f64 },

    #[error("degenerate variance: {0}")]
    DegenerateVariance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
