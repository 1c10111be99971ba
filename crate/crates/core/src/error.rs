use thiserror::Error;

/// Errors raised by the algebra, quadrature and transport routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands do not live in the same truncated algebra.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An element failed the group-like test `Δ(X) = X ⊗ X`.
    #[error("not group-like: coefficient of {left:?} ⊗ {right:?} is {coproduct} in Δ(X) but {product} in X ⊗ X")]
    NotGroupLike {
        left: Vec<u8>,
        right: Vec<u8>,
        coproduct: String,
        product: String,
    },

    /// A numeric method could not reach the requested tolerance.
    #[error("tolerance {tol:e} not reached: best value {value} with error bound {bound:e}")]
    Resource { value: f64, bound: f64, tol: f64 },

    /// Evaluating a formal MZV symbol failed.
    #[error("evaluating ω({symbol}): {source}")]
    Evaluation { symbol: String, source: Box<Error> },

    /// A serialized document could not be read back.
    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
