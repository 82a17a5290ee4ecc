use crate::curve::CurveKind;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure classification used by callers that need to distinguish bad
/// inputs from numerical breakdowns (the CLI maps these to exit codes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Invalid input data, configuration, or file contents.
    Validation,
    /// A computation that started on valid inputs failed to complete.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("time grid must be strictly increasing and positive (index {index}, value {value})")]
    InvalidGrid { index: usize, value: f64 },
    #[error("curve has {values} values for a grid of {times} times")]
    CurveLength { values: usize, times: usize },
    #[error("{kind:?} curve invariant violated at index {index} (value {value})")]
    CurveInvariant {
        kind: CurveKind,
        index: usize,
        value: f64,
    },
    #[error("integration range is empty: start {start} is not below end {end}")]
    EmptyRange { start: f64, end: f64 },

    #[error("dataset has no observed events")]
    NoEvents,
    #[error("dataset row {row} has {got} features, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("invalid observation at row {row}: {message}")]
    InvalidObservation { row: usize, message: String },
    #[error("feature vector has {got} entries, expected {expected}")]
    FeatureWidth { got: usize, expected: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("missing required column `{column}` in {path}")]
    MissingColumn { path: String, column: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: unsupported schema `{schema}` version {version}")]
    UnsupportedSchema {
        path: String,
        schema: String,
        version: u32,
    },

    #[error("Newton solver did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
    },
    #[error("singular Hessian at feature `{name}` (index {index})")]
    SingularHessian { index: usize, name: String },
    #[error("linear system is singular at column {index}")]
    SingularSystem { index: usize },
    #[error("coalition design is rank-deficient at column {index}; increase the number of sampled coalitions")]
    RankDeficientDesign { index: usize },
    #[error(
        "exact enumeration is limited to p <= {limit} features (requested p = {p}); \
         use the sampling or kernel estimator instead"
    )]
    ExactGuard { p: usize, limit: usize },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:.6e}, f(hi) = {f_hi:.6e}")]
    NoRoot { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    #[error("{context}: {message}")]
    InvalidInput {
        context: &'static str,
        message: String,
    },
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(context: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            context,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }

    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NonConvergence { .. }
            | SingularHessian { .. }
            | SingularSystem { .. }
            | RankDeficientDesign { .. }
            | NoRoot { .. }
            | UndefinedMetric(_) => ErrorClass::Computation,
            Stage { source, .. } => source.class(),
            _ => ErrorClass::Validation,
        }
    }
}
