use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the counting pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed PNM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("invalid dimensions {width}x{height} for {len} samples")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("image is empty")]
    EmptyImage,
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("histogram has {occupied} occupied bins, need at least {classes}")]
    DegenerateHistogram { occupied: usize, classes: usize },
    #[error("unsupported class count {0}, expected 2 or 4")]
    InvalidClassCount(usize),
    #[error("thresholds must be strictly increasing and within 0..=254")]
    InvalidThresholds,
    #[error("image {width}x{height} is smaller than the required {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("invalid hough parameters: {0}")]
    InvalidParams(String),
    #[error("invalid scene: {0}")]
    InvalidSpec(String),
    #[error("malformed truth file: {0}")]
    MalformedTruth(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
