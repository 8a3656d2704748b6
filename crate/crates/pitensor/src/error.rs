//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong across the space oracles, solvers, and
/// projection constructors.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid space description: {0}")]
    InvalidSpace(&'static str),

    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("vector is zero")]
    ZeroVector,

    #[error("unit ball is not polyhedral for this family")]
    NotPolyhedral,

    #[error("vertex enumeration budget exceeded: dim {dim} > cap {cap}")]
    VertexBudgetExceeded { dim: usize, cap: usize },

    #[error("solver requires a different space family: {0}")]
    WrongFamily(&'static str),

    #[error("linear program infeasible (atom set should always span; this is a bug)")]
    LpInfeasible,

    #[error("linear program unbounded (this is a bug for the norm programs)")]
    LpUnbounded,

    #[error("iteration budget exceeded after {iters} iterations")]
    BudgetExceeded { iters: usize },

    #[error("snap failed on atom {atom}: {reason}")]
    SnapFailed { atom: usize, reason: &'static str },

    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),

    #[error("dual operator does not attain the decomposition value on this tensor")]
    NotAttainingAtZ,

    #[error("dual operator norm exceeds one beyond tolerance")]
    NotNormOne,

    #[error("index range invalid: {0}")]
    BadRange(&'static str),

    #[error("partition block {0} is empty")]
    EmptyBlock(usize),

    #[error("partition block {0} has zero measure")]
    ZeroMeasureBlock(usize),

    #[error("cell indices do not form a partition: {0}")]
    InvalidPartition(&'static str),

    #[error("absolute norm failed the monotonicity check")]
    NonMonotoneNorm,

    #[error("series tail too heavy: tail bound {tail} is not below eps/2 = {half_eps}")]
    TailTooHeavy { tail: f64, half_eps: f64 },

    #[error("no exact-dual solver applies to this space pair")]
    SolverInconclusive,

    #[error("dual space has no vertex-style descriptor for this family")]
    DualNotRepresentable,

    #[error("singular value decomposition did not converge")]
    SvdNoConvergence,
}

pub type Result<V> = std::result::Result<V, Error>;

impl Error {
    /// Process exit code used by the batch front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 5,
            Error::VertexBudgetExceeded { .. } => 5,
            _ => 4,
        }
    }
}
