use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An integral failed to converge or produced a non-finite value.
    #[error("divergent integral: {0}")]
    Divergence(String),
    /// A mathematical precondition of a bound is not satisfied.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A density or wavefunction descriptor is malformed.
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn divergence(msg: impl Into<String>) -> Self {
        Error::Divergence(msg.into())
    }

    /// Prefixes the message with the name of the term being evaluated.
    pub fn in_term(self, term: &str) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{term}: {m}")),
            Error::Divergence(m) => Error::Divergence(format!("{term}: {m}")),
            Error::Precondition(m) => Error::Precondition(format!("{term}: {m}")),
            Error::InvalidDescriptor(m) => Error::InvalidDescriptor(format!("{term}: {m}")),
        }
    }
}
