use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A requested expansion or Taylor order exceeds the supported maximum.
    #[error("order overflow: requested {requested}, maximum {max}")]
    OrderOverflow { requested: usize, max: usize },
    /// An iterative solver did not reach its tolerance.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// The high-precision reference evaluation failed.
    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::OrderOverflow { .. } => "order_overflow",
            Error::Convergence(_) => "convergence",
            Error::Oracle(_) => "oracle",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
