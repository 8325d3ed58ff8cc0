use thiserror::Error;

/// Errors produced by lattice, codebook, simulation and bounds operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("lattice membership check failed: {0}")]
    Membership(String),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("enumeration budget exceeded: spent {spent} of {budget} checks")]
    BudgetExceeded { spent: u64, budget: u64 },

    #[error("codebook too large: p^m does not fit in a u64 index")]
    CodebookTooLarge,

    #[error("certificate failed: {0}")]
    CertificateFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code for the CLI: 2 config, 3 resource, 4 invariant/certificate.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) | Error::NotPrime(_) => 2,
            Error::BudgetExceeded { .. } | Error::CodebookTooLarge => 3,
            Error::CertificateFailed(_) => 4,
            _ => 1,
        }
    }
}
