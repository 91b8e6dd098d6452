use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis size {0} is not a positive multiple of 4")]
    InvalidBasisSize(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("driving terms break parity; use a full-space build")]
    DrivingBreaksParity,

    #[error("dense dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("eigensolver failed to converge at index {0}")]
    NoConvergence(usize),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("Mandel Q is undefined for a vacuum-only photon distribution")]
    VacuumState,

    #[error("lambda = {lambda} is within the pole tolerance at j = {j}")]
    NearPole { j: usize, lambda: f64 },

    #[error("photon number {photon} is outside the truncation (max {max})")]
    OutsideTruncation { photon: usize, max: usize },

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
