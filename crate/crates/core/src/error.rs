use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A resource guard refused the request.
    #[error("{what} requires {required} but the configured cap is {cap}; {hint}")]
    CapExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
        hint: &'static str,
    },

    /// Parameters are valid but the requested quantity does not exist for them.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A result contradicts a guaranteed property; this is either a bug or a
    /// floating-point boundary case that needs a closer look.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
