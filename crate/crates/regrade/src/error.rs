use thiserror::Error;

/// Crate-wide error type.
///
/// `InvariantViolation` is reserved for situations where a structural
/// guarantee of the theory fails on concrete data (e.g. a commutation
/// matrix whose square is not `|G|·Id`); it maps to a distinct process
/// exit code in the CLI so that such failures are never confused with
/// bad input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("root-of-unity order mismatch: {0} vs {1} (rescale with change_order first)")]
    OrderMismatch(u32, u32),

    #[error("change_order: {0} does not divide {1}")]
    BadOrderChange(u32, u32),

    #[error("element index {0} out of range for group of order {1}")]
    ForeignElement(usize, usize),

    #[error("invalid group descriptor: {0}")]
    BadGroup(String),

    #[error("invalid cocycle: {0}")]
    BadCocycle(String),

    #[error("invalid bicharacter: {0}")]
    BadBicharacter(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("invalid permutation: {0}")]
    BadPermutation(String),

    #[error("{0} requires an abelian group")]
    NotAbelian(&'static str),

    #[error("invalid polynomial: {0}")]
    BadPolynomial(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("matrix too large for exact integer determinant: {0}x{0} at order {1}")]
    MatrixTooLarge(usize, u32),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("nondegenerate commutation function has no kernel vector (M^2 = |G|·Id)")]
    NoKernel,

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
