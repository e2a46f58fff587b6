use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed channel description or file contents.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A parameter outside its documented domain (mu, eps, index, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A structural precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Probability mass drifted too far from one during a transform or merge.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    /// A brute-force computation was asked for more work than its guard allows.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
