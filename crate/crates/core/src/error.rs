use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector must have at least one component")]
    EmptyVector,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("matrix is not orthogonal (max |Q^T Q - I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("degenerate curve: arc speed {speed:e} is too small")]
    DegenerateCurve { speed: f64 },

    #[error("degenerate signal: magnitude is zero")]
    DegenerateMagnitude,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("every sample is degenerate (|v| below the mask threshold)")]
    AllDegenerate,

    #[error("time bases do not match: {0}")]
    TimeBaseMismatch(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
