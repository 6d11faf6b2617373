use thiserror::Error;

/// Errors raised by tensor operations, solvers, fixtures and file I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("adjoint structure check failed: deviation {deviation:e} exceeds {limit:e}")]
    AdjointStructure { deviation: f64, limit: f64 },

    #[error("right-hand side {slot} is not eta-Hermitian (deviation {deviation:e})")]
    NotEtaHermitianRhs { slot: String, deviation: f64 },

    #[error("system is inconsistent: condition {condition} failed at stage {stage}")]
    Inconsistent { stage: String, condition: String },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("cannot perturb {slot}: the relevant projector is zero (coefficient is surjective)")]
    NoNullSpace { slot: String },

    #[error("missing tensor `{0}`")]
    MissingSlot(String),

    #[error("parse error in {context}: {detail}")]
    Parse { context: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch { op, detail: detail.into() }
    }

    pub(crate) fn parse(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse { context: context.into(), detail: detail.into() }
    }
}
