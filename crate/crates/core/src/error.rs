use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("degenerate partition: {0}")]
    DegeneratePartition(String),

    #[error(
        "all slice radii collapse to 0 at sigma {sigma}; convolve directly with a small kernel instead"
    )]
    DegenerateScale { sigma: f64 },

    #[error("kernel radius {radius} does not fit a signal of length {len}")]
    KernelTooLarge { radius: usize, len: usize },

    #[error("malformed PGM: {0}")]
    Pgm(String),

    #[error("malformed parameter file: {0}")]
    Params(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
