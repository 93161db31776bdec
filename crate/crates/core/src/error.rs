use thiserror::Error;

/// Errors raised by the algebraic engine and the job front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("no ({j}, {n})-shuffles: j exceeds n")]
    ShuffleRange { j: usize, n: usize },

    #[error("chart mismatch")]
    ChartMismatch,

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("degree violation: {0}")]
    DegreeViolation(String),

    #[error("multiplicity mismatch: element has multiplicity {found}, {given} covectors supplied")]
    MultiplicityMismatch { found: String, given: usize },

    #[error("structure maps undefined at arities {0:?}")]
    ArityGap(Vec<usize>),

    #[error("element is not homogeneous")]
    Inhomogeneous,

    #[error("argument outside the abelian subalgebra: {0}")]
    NotInAbelianPart(String),

    #[error("combined structure requires positive Δ")]
    BlendedDelta,

    #[error("frame with constant pairing required")]
    NonConstantPairing,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("symmetry check failed: {0}")]
    Symmetry(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
