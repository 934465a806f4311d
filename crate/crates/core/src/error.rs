use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid too narrow: {lost:.3e} of the probability mass left the grid")]
    GridTooNarrow { lost: f64 },

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("visibility undefined: restricted region is all zero")]
    UndefinedVisibility,

    #[error("negative probability {value:.3e} at bin ({row}, {col})")]
    NegativeProbability { value: f64, row: usize, col: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("step rejected: electron {index} moved {distance:.3} nm in one step")]
    StepRejected { index: usize, distance: f64 },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
