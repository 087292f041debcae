use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid modulus: {0}")]
    Modulus(String),

    #[error("element does not belong to this ring context")]
    ContextMismatch,

    #[error("malformed element: {0}")]
    Element(String),

    #[error(
        "gamma {0} is not a unit; multipliers in the maximal ideal give Cayley digraphs \
         that are not strongly connected and are not supported"
    )]
    NonUnitGamma(String),

    #[error("invalid connection set: {0}")]
    ConnectionSet(String),

    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: u64, n: u64 },

    #[error("graph too large for {what}: n = {n}, limit {limit}")]
    TooLarge {
        what: &'static str,
        n: u64,
        limit: u64,
    },

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
