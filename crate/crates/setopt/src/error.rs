//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("vertex list must be nonempty")]
    EmptyVertexSet,

    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("unsupported shape combination: {0}")]
    UnsupportedShape(&'static str),

    #[error("cone is not pointed")]
    NonPointedCone,

    #[error("dual generator enumeration unsupported in dimension {dim}; supply dual_generators")]
    DualEnumerationUnsupported { dim: usize },

    #[error("supplied dual generator has negative pairing with a cone generator")]
    InvalidDualGenerator,

    #[error("cone has empty interior (generators are not full rank)")]
    InteriorEmpty,

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("invalid sampling schedule: {0}")]
    InvalidSchedule(String),

    #[error("negative radius")]
    NegativeRadius,

    #[error("problem file syntax error: {0}")]
    Syntax(String),

    #[error("unknown node kind: {0}")]
    UnknownNodeKind(String),

    #[error("dangling reference to `{0}`")]
    DanglingReference(String),

    #[error("cyclic reference through `{0}`")]
    CyclicReference(String),

    #[error("invalid problem file at {path}: {message}")]
    InvalidProblem { path: String, message: String },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("witness sequence does not converge to the base point")]
    NonConvergentWitness,

    #[error("empty local grid around the candidate point")]
    EmptyLocalGrid,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
