use thiserror::Error;

/// Errors produced by the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("undefined empirical risk: dataset is empty")]
    EmptyDataset,

    #[error("hypothesis class `{0}` has no members")]
    EmptyClass(String),

    #[error("enumeration cap exceeded: class has {cardinality} candidates, cap is {cap}")]
    CapExceeded { cardinality: u128, cap: u64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("hypothesis is not a member of class `{0}`")]
    NotAMember(String),

    #[error("family `{0}` has no neighbourhood structure")]
    UnsupportedFamily(String),

    #[error("point set contains duplicate points")]
    DuplicatePoints,

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        LabError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } | LabError::InvalidParameter { .. } | LabError::Schema(_) => 2,
            LabError::CapExceeded { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
