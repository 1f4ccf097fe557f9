use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to be
/// reported verbatim by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("requested n = {requested} exceeds the truncation order {order}")]
    Order { requested: usize, order: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("series did not converge: {0}")]
    NonConvergent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_order(requested: usize, order: usize) -> Result<()> {
    if requested > order {
        Err(Error::Order { requested, order })
    } else {
        Ok(())
    }
}
