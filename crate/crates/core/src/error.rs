use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("{width}x{height} image is not divisible by factor {factor}")]
    NotDivisible {
        width: usize,
        height: usize,
        factor: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("truncated stream: {0}")]
    Truncated(String),

    #[error("image dimensions overflow: {width}x{height}")]
    DimensionOverflow { width: u64, height: u64 },

    #[error("malformed image data: {0}")]
    Malformed(String),

    #[error("cannot write {channels}-channel image as {format}")]
    ChannelFormatMismatch { channels: usize, format: &'static str },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("report serialization failed: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
