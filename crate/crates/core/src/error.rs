use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operands belong to different group models ({left} vs {right})")]
    ModelMismatch { left: String, right: String },

    #[error("ball of radius {radius} would hold {predicted} elements, over the budget of {budget}")]
    BudgetExceeded {
        radius: u32,
        predicted: u128,
        budget: usize,
    },

    #[error("invalid homomorphism: relator {relator} does not map to the identity")]
    InvalidHomomorphism { relator: String },

    #[error("invalid group model: {0}")]
    InvalidModel(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("tail certificate violated at {element}: {detail}")]
    CertificateViolation { element: String, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("matrix is not Hermitian (defect {defect:e} above allowance {allowance:e})")]
    NotHermitian { defect: f64, allowance: f64 },

    #[error("window is not positive semidefinite (minimal eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("dense problem of dimension {dim} exceeds the limit of {limit}")]
    DenseLimit { dim: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
