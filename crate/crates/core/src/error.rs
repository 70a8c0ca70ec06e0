use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("operator is indefinite (eigenvalue {eigenvalue:e} below zero)")]
    Indefinite { eigenvalue: f64 },

    #[error("symbol is not positive on the unit sphere (sample value {value:e})")]
    NonPositiveSymbol { value: f64 },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("{stage} did not converge: {detail}")]
    NonConvergence { stage: &'static str, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("function support leaks outside the box: {0}")]
    SupportLeak(String),

    #[error("matrix is not hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
