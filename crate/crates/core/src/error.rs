use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function (e.g. `log_gamma(-1)`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter combination violates a stated admissibility constraint.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A malformed field description.
    #[error("field spec error: {0}")]
    FieldSpec(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-integrable weight: {0}")]
    NonIntegrable(String),

    /// Adaptive quadrature ran out of subdivisions; carries the best estimate.
    #[error("accuracy error: {message} (best estimate {estimate}, error {error})")]
    Accuracy {
        message: String,
        estimate: f64,
        error: f64,
    },

    #[error("inconsistent limit study: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
