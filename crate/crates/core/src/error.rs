use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("search point has length {found}, instance expects {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("optimum is unreachable: no downward transition out of level {level}")]
    UnreachableOptimum { level: usize },

    #[error("first-passage system is singular: target level {target} is unreachable from level {level}")]
    SingularSystem { target: usize, level: usize },

    #[error("levels must satisfy low < start < high (got low={low}, start={start}, high={high}, n={n})")]
    LevelOrder {
        low: usize,
        start: usize,
        high: usize,
        n: usize,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
