//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at observation {row}, variable {col}")]
    NonFiniteInput { row: usize, col: usize },

    #[error("ties in variable {variable} (tie policy is `error`)")]
    TiesFound { variable: usize },

    #[error("need at least {min} observations, got {got}")]
    TooFewObservations { got: usize, min: usize },

    #[error("need at least {min} variables, got {got}")]
    TooFewVariables { got: usize, min: usize },

    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("variable {variable} has zero sample variance")]
    ZeroVariance { variable: usize },

    #[error("matrix not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("matrix not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("{name} out of range: {detail}")]
    InvalidParam { name: &'static str, detail: String },

    #[error("variance formula produced a non-positive value {value}")]
    DegenerateVariance { value: f64 },

    #[error("statistic {statistic} is undefined here: {reason}")]
    Undefined { statistic: String, reason: String },

    #[error("enumeration too large: {detail}")]
    TooLarge { detail: String },

    #[error("quantile table: {0}")]
    BadTable(String),

    #[error("scenario covariance not positive semidefinite (eigenvalue {eigenvalue:e})")]
    ScenarioNotPsd { eigenvalue: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            detail: detail.into(),
        }
    }
}
