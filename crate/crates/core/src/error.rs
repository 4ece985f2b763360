use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension parameter n must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("singular matrix")]
    Singular,

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("degenerate metric while building a phi-basis: {0}")]
    Degenerate(String),

    #[error("structure must be given in the standard phi-basis")]
    NotStandardBasis,

    #[error("basis is not adapted: {0}")]
    NotAdapted(String),

    #[error("tensors live over different structures")]
    StructureMismatch,

    #[error("not a structure-group element: {0}")]
    NotGroupElement(String),

    #[error("no invertible sample found after {0} attempts")]
    SamplingExhausted(usize),

    #[error("operator constraint {constraint} violated: {detail}")]
    OperatorConstraint { constraint: &'static str, detail: String },

    #[error("inadmissible tensor: {0}")]
    Inadmissible(String),

    #[error("tensor is not in {subspace}")]
    NotInSubspace { subspace: &'static str },

    #[error("class index {0} out of range")]
    ClassIndex(usize),

    #[error("class F_{class} vanishes in dimension {dim}")]
    VanishingClass { class: usize, dim: usize },

    #[error("dimension audit is limited to n <= {max}, got n = {n}")]
    AuditGuard { n: usize, max: usize },

    #[error("parameter error: {0}")]
    Params(String),

    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
