use thiserror::Error;

/// Errors raised by the construction, kernel and statistics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("index {index} outside table range 1..={max}")]
    OutOfRange { index: u128, max: u128 },

    /// `|sin(pi * m * x)|` fell below the guard; use direct summation instead.
    #[error("near-singular denominator |sin(pi*{multiple}*x)| = {magnitude:e}")]
    Singular { multiple: u128, magnitude: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource ceiling exceeded: {requested} stream elements requested, ceiling is {ceiling}")]
    ResourceCap { requested: u128, ceiling: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
