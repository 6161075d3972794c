use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter violates one of the structural hypotheses, e.g. `(f_3)` or `(K)`.
    #[error("{detail}: hypothesis {hypothesis}")]
    Hypothesis {
        hypothesis: &'static str,
        detail: String,
    },

    #[error("profile is not integrable: q * decay = {rate} <= N = {dim}")]
    NonIntegrable { rate: f64, dim: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("non-finite value in {op} at node {node}")]
    NonFinite { op: &'static str, node: usize },

    #[error("degenerate ray: {0}")]
    DegenerateRay(String),

    #[error("magnetic potential too rough near the origin: {0}")]
    RoughPotential(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
