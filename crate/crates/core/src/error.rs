use thiserror::Error;

/// Errors raised by the credal transport library.
///
/// The variants line up with the exit-code classes of the command line
/// front end: malformed input, a mathematically undefined request, an
/// instance beyond an enumeration cap, and solver failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    Size {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn size(what: &'static str, actual: usize, limit: usize) -> Self {
        Error::Size {
            what,
            actual,
            limit,
        }
    }
}
