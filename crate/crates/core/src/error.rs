use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A projective image touched or wrapped through the point at infinity.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Enumeration would exceed the desk-scale product budget.
    #[error("resource error: {0}")]
    Resource(String),
    /// The operation exists but not for this kind of input.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn geometry(msg: impl Into<String>) -> Error {
    Error::Geometry(msg.into())
}

pub(crate) fn resource(msg: impl Into<String>) -> Error {
    Error::Resource(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> Error {
    Error::Unsupported(msg.into())
}

/// Largest number of matrix products any enumeration may visit.
pub const MAX_PRODUCTS: f64 = 1e7;

/// Rejects `branches^depth` above [`MAX_PRODUCTS`].
pub(crate) fn check_budget(branches: usize, depth: usize) -> Result<()> {
    let count = (branches as f64).powi(depth as i32);
    if count > MAX_PRODUCTS {
        return Err(Error::Resource(format!(
            "{branches}^{depth} = {count:.3e} products exceeds the limit of {MAX_PRODUCTS:.0e}"
        )));
    }
    Ok(())
}
