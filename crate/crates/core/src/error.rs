use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("enumeration budget exceeded: {needed} evaluations requested, budget is {budget}")]
    Budget { needed: u128, budget: u64 },

    #[error("recovery failed: residual norm {residual} above tolerance")]
    Recovery { residual: f64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Solver and budget failures are distinguished from bad input.
    pub fn is_computational(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::Recovery { .. } | Error::Solver(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
