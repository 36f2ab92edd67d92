use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceLimit { what: String, needed: u128, cap: u128 },

    /// An identity that must hold for every input failed. Callers treat this
    /// as the loudest possible failure.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_cap(what: &str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::ResourceLimit {
            what: what.to_string(),
            needed,
            cap,
        })
    } else {
        Ok(())
    }
}
