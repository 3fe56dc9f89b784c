//! Crate-wide error type.
//!
//! One enum covers every fallible entry point so that results compose across
//! modules without conversion boilerplate. Variants carry enough context to
//! diagnose a failure from the message alone.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix entries must be finite, found NaN or infinity{}", fmt_ctx(.context))]
    NonFinite { context: Option<String> },

    #[error("basis index out of range: got {index}, valid range is 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not unitary: ||U*U - I|| = {residual:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("word refers to generator {index} but the set has {available} elements")]
    BadWord { index: usize, available: usize },

    #[error("operands belong to different algebras: {details}")]
    AlgebraMismatch { details: String },

    #[error("representations act on different ambient dimensions: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("empty sample set: {context}")]
    EmptySampleSet { context: String },

    #[error("empty grid: {context}")]
    EmptyGrid { context: String },

    #[error("metric space needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("unknown point label {label:?}")]
    UnknownPoint { label: String },

    #[error("measures live on different metric spaces")]
    SpaceMismatch,

    #[error("solver failed: {details}")]
    SolverFailure { details: String },

    #[error("scenario needs dimension at least {needed}, got {got}")]
    DimensionTooSmall { needed: usize, got: usize },

    #[error("projection subsets must be distinct, subsets {first} and {second} coincide")]
    DuplicateSubset { first: usize, second: usize },

    #[error("unknown scenario {name:?}, known scenarios: {known}")]
    UnknownScenario { name: String, known: String },

    #[error("configuration error: {details}")]
    ConfigError { details: String },

    #[error("invalid input: {reason}")]
    Invalid { reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn fmt_ctx(ctx: &Option<String>) -> String {
    match ctx {
        Some(c) => format!(" ({c})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        Error::Invalid { reason: reason.into() }
    }

    pub(crate) fn config(details: impl Into<String>) -> Self {
        Error::ConfigError { details: details.into() }
    }

    pub(crate) fn algebra_mismatch(details: impl Into<String>) -> Self {
        Error::AlgebraMismatch { details: details.into() }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), source }
    }
}
