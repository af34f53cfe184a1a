//! Crate-wide error type.
//!
//! Everything here is exact arithmetic, so the failure modes are few and
//! sharp: a caller handed us something outside a documented precondition, a
//! 64-bit intermediate would overflow, or the fill-out memo hit its memory
//! cap. None of these are recoverable mid-computation; they all surface as
//! hard errors.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A documented precondition was violated (empty set, zero modulus,
    /// out-of-range element, mismatched moduli, malformed literal, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A checked 64-bit operation overflowed. The payload names the
    /// operation so the caller can tell which computation blew up.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// The fill-out memo grew past its configured byte cap. We never drop
    /// branches to stay under the cap — completeness over graceful
    /// degradation — so the only safe response is to stop.
    #[error("memo capacity exceeded: {used} bytes of keys against a cap of {cap} bytes")]
    MemoCapacity { used: usize, cap: usize },

    /// `classify` was asked for a modulus outside the range its theory
    /// covers, and the caller did not force the issue.
    #[error("unsupported modulus: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
