use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A mask pixel carries a category index outside `0..=max`.
    #[error("pixel ({x}, {y}) has category {value}, outside 0..={max}")]
    PixelOutOfRange {
        x: usize,
        y: usize,
        value: i64,
        max: u32,
    },

    #[error("invalid mask dimensions {width}x{height}: {reason}")]
    MaskShape {
        width: usize,
        height: usize,
        reason: String,
    },

    #[error("detection {index}: {reason}")]
    InvalidDetection { index: usize, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    /// Block shapes disagree with the dataset configuration.
    #[error("shape mismatch in {block}: expected {expected}, found {found}")]
    ShapeMismatch {
        block: String,
        expected: usize,
        found: usize,
    },

    #[error("training error: {0}")]
    Training(String),

    #[error("transform would clip {lost} labelled pixel(s)")]
    Clipping { lost: usize },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
