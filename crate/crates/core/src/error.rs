use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated an API precondition (empty grid, wrong dimension, ...).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate equation: q must be nonzero")]
    DegenerateEquation,

    #[error("characteristic roots are not real and distinct (discriminant {discriminant})")]
    NonrealOrRepeatedRoots { discriminant: f64 },

    #[error("roots alpha={alpha}, beta={beta} violate 0 < |beta| < |alpha| < 1")]
    OutsideValidityRegion { alpha: f64, beta: f64 },

    #[error("truncation failed: tail bound {achieved:e} after {max_terms} terms exceeds target {target:e}")]
    TruncationFailure {
        achieved: f64,
        target: f64,
        max_terms: usize,
    },

    #[error("config error at line {line}, field `{field}`: {message}")]
    Config {
        line: usize,
        field: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
