use thiserror::Error;

/// Errors raised by the numerical kernels, builders and solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (shapes, lengths, parameters).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Step size outside the admissible interval `(0, upper)` or `(0, upper]`.
    #[error(
        "step size h = {h:e} outside the admissible interval (0, {upper:e}{close}",
        close = if *upper_inclusive { "]" } else { ")" }
    )]
    StepSize { h: f64, upper: f64, upper_inclusive: bool },

    #[error("invalid solver configuration: {0}")]
    Config(String),

    /// Polytope projection hit its iteration cap. Carries the best iterate.
    #[error("projection did not reach tolerance {requested:e} (achieved {achieved:e}) after {iterations} iterations")]
    ProjectionNotConverged {
        requested: f64,
        achieved: f64,
        iterations: usize,
        best: Vec<f64>,
    },

    #[error("constraint system is infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_mismatch(expected: impl std::fmt::Debug, found: impl std::fmt::Debug) -> Error {
    Error::ShapeMismatch {
        expected: format!("{expected:?}"),
        found: format!("{found:?}"),
    }
}
