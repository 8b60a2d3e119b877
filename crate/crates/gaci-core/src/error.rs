//! Error type shared across the crate.
//!
//! Ingest errors carry the file path plus the row/column needed to fix the
//! input; numeric errors name the offending column, term, or variable so a
//! failure in an 80-column regression points at the culprit instead of a
//! generic "singular matrix".

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaciError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: file contains no data rows")]
    EmptyFile { path: String },

    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: String, column: String },

    #[error("{path}: row {row}, column `{column}`: `{value}` is not a finite number")]
    NonNumericCell {
        path: String,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: duplicate country `{country}`")]
    DuplicateCountry { path: String, country: String },

    #[error("{path}: duplicate observation for ({country}, {year})")]
    DuplicateObservation {
        path: String,
        country: String,
        year: i32,
    },

    #[error("{path}: row {row}: year {year} outside [1900, 2100]")]
    YearOutOfRange { path: String, row: usize, year: i32 },

    #[error("{path}: row {row}: {message}")]
    InvalidValue {
        path: String,
        row: usize,
        message: String,
    },

    #[error("refusing to write an empty table to {path}")]
    EmptyReport { path: String },

    /// A domain-type invariant was violated during construction.
    #[error("{0}")]
    Domain(String),

    #[error("normalization range for {context} is degenerate: max == min == {value}")]
    DegenerateRange { context: String, value: f64 },

    #[error(
        "design matrix is rank deficient at column `{column}` \
         (pivot {pivot:.3e} below tolerance {tolerance:.3e})"
    )]
    RankDeficient {
        column: String,
        pivot: f64,
        tolerance: f64,
    },

    #[error("{n_obs} observations cannot identify {k} regressors")]
    TooFewObservations { n_obs: usize, k: usize },

    #[error("base country `{0}` does not appear in the panel")]
    UnknownBaseCountry(String),

    #[error("moment matrix XᵀX is numerically singular")]
    SingularMoment,

    #[error("standard error for term `{0}` is zero; t statistic undefined")]
    ZeroStandardError(String),

    #[error("`{0}` has zero variance; correlation undefined")]
    DegenerateVariance(String),

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("pillar {0} missing from the matrix")]
    MissingPillar(usize),

    #[error("score sets share no countries")]
    EmptyIntersection,

    #[error("total input must be positive (got {0})")]
    ZeroInput(f64),

    #[error("world GDP must be positive (got {0})")]
    ZeroWorldGdp(f64),

    #[error("series value must be positive (got {0})")]
    NonPositiveValue(f64),

    #[error("`{context}` references country `{country}` absent from the pillar matrix")]
    UnknownCountry { context: String, country: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GaciError>;

impl GaciError {
    /// True for errors caused by malformed or unreadable input data, as
    /// opposed to numeric/model failures. CLI front ends use this split
    /// for exit codes.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            GaciError::Io { .. }
                | GaciError::Csv { .. }
                | GaciError::EmptyFile { .. }
                | GaciError::MissingColumn { .. }
                | GaciError::NonNumericCell { .. }
                | GaciError::DuplicateCountry { .. }
                | GaciError::DuplicateObservation { .. }
                | GaciError::YearOutOfRange { .. }
                | GaciError::InvalidValue { .. }
                | GaciError::EmptyReport { .. }
        )
    }
}
