use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Unsupported` marks inputs that are well-formed but outside the exact
/// machinery's scope (for example irrational roots where a finite place
/// demands exact arithmetic); callers can map it to a distinct exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("coefficient budget exceeded: ~{digits} decimal digits, budget {budget}")]
    BudgetExceeded { digits: u64, budget: u64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
