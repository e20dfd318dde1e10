use thiserror::Error;

/// Errors raised by node construction, kernel evaluation and the estimators.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    #[error("invalid degree {degree}: {reason}")]
    InvalidDegree { degree: i64, reason: &'static str },

    #[error("closed form is singular: |{what}| = {value:e} is below the threshold {threshold:e}")]
    Singular {
        what: &'static str,
        value: f64,
        threshold: f64,
    },

    #[error("expected {expected} values, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value {value} at node {index} ({x}, {y})")]
    NonFinite {
        index: usize,
        x: f64,
        y: f64,
        value: f64,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("interpolation matrix is singular for the given nodes")]
    NotUnisolvent,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
