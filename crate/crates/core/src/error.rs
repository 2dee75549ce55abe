use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trace manifest not found at {0}")]
    MissingManifest(PathBuf),
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error("frame {file}: expected {expected} bytes, found {actual}")]
    FrameSizeMismatch {
        file: String,
        expected: usize,
        actual: usize,
    },
    #[error("frame {file} is {width}x{height}, trace is {expected_width}x{expected_height}")]
    DimensionMismatch {
        file: String,
        width: u32,
        height: u32,
        expected_width: u32,
        expected_height: u32,
    },
    #[error("trace has {0} frame(s); at least 2 are required")]
    TooFewFrames(usize),
    #[error("unsupported frame format: {0}")]
    UnsupportedFormat(String),
    #[error("invalid frame geometry: {0}")]
    InvalidGeometry(String),
    #[error("coverage is undefined before any sample is observed")]
    UndefinedCoverage,
    #[error("corrupt compressed data: {0}")]
    Corrupt(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("round-trip verification failed on frame {frame}, block ({x}, {y})")]
    Verification { frame: usize, x: u32, y: u32 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Verification { .. } => 3,
            _ => 2,
        }
    }
}
