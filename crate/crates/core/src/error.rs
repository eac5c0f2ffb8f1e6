//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A column required by the schema is absent from the CSV header.
    #[error("schema error: missing column '{column}' in {path}")]
    MissingColumn { column: String, path: String },

    /// A cell could not be parsed; the row index is 1-based over data rows.
    #[error("parse error at {path} row {row}, column '{column}': {reason}")]
    RowParse {
        path: String,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("empty release: {path} has a header but no module rows")]
    EmptyRelease { path: String },

    #[error("no common metrics across releases after exclusions")]
    EmptyMetricIntersection,

    #[error("unknown target {project}-{release}")]
    UnknownTarget { project: String, release: String },

    #[error("no source projects: every release belongs to target project '{project}'")]
    NoSourceProjects { project: String },

    #[error("empty sample: {context}")]
    EmptySample { context: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A measure is undefined for the given counts (e.g. FOR with no
    /// predicted cleans); callers report it as not-applicable, never as 0.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Training failure annotated with the (inducer, sample) position.
    #[error("training classifier (inducer {inducer}, sample {sample}) failed: {source}")]
    EnsembleTraining {
        inducer: usize,
        sample: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported model artifact: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
