use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the toolkit.
///
/// [`Error::is_rejection`] separates validation failures (bad data, unmet
/// preconditions) from malformed input and I/O trouble.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cloud diameter {diameter} exceeds 1; divide distances by the diameter first")]
    Normalization { diameter: f64 },

    #[error("not an ultrametric: triple {triple:?} violates by {slack}")]
    NotUltrametric {
        triple: (usize, usize, usize),
        slack: f64,
    },

    #[error("depth {depth} exceeds the maximum {max}")]
    DepthExceeded { depth: usize, max: usize },

    #[error("rejected: {0}")]
    Rejected(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for validation rejections, false for parse and I/O failures.
    pub fn is_rejection(&self) -> bool {
        !matches!(
            self,
            Error::Parse(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_)
        )
    }
}
