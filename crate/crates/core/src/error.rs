use thiserror::Error;

use crate::numopt::OptError;

/// Errors raised by the library.
///
/// Every variant maps to a stable code (see [`Error::code`]) that the CLI and
/// config loader surface to users.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("element count n = {0} is outside the supported range 1..=5")]
    UnsupportedSize(usize),

    #[error("distribution does not sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("negative or non-finite probability {value} at index {index}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("invalid variable subset: {0}")]
    InvalidVarSet(String),

    #[error("zero probability at cell {index}; log-linear coordinates undefined")]
    ZeroProbability { index: usize },

    #[error("iterative proportional fitting did not converge: residual {residual:e} after {sweeps} sweeps")]
    IpfNotConverged { residual: f64, sweeps: usize },

    #[error("beta search still boundary-active at beta = {beta} after widening")]
    BoundaryMinimum { beta: f64 },

    #[error("constraint residual {residual:e} above tolerance after {restarts} restarts")]
    Infeasible { residual: f64, restarts: usize },

    #[error("matrix `{0}` is not symmetric")]
    NotSymmetric(String),

    #[error("matrix `{0}` is not positive definite")]
    NotPositiveDefinite(String),

    #[error("matrix `{0}` is not square with side n")]
    BadMatrixShape(String),

    #[error("covariance is rank deficient")]
    RankDeficient,

    #[error("time series too short: {len} rows, need at least {needed}")]
    InsufficientData { len: usize, needed: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid config: {0}")]
    Schema(String),

    #[error("state {state} is out of range for n = {n}")]
    StateOutOfRange { state: usize, n: usize },

    #[error("measure `{0}` is not defined for this system type")]
    UnsupportedMeasure(String),

    #[error(transparent)]
    Optimization(#[from] OptError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable error code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } | Error::BadMatrixShape(_) => "E_DIMENSION",
            Error::UnsupportedSize(_) => "E_UNSUPPORTED_SIZE",
            Error::NotNormalized { .. } => "E_NOT_NORMALIZED",
            Error::InvalidProbability { .. } => "E_INVALID_PROBABILITY",
            Error::InvalidVarSet(_) => "E_VARSET",
            Error::ZeroProbability { .. } => "E_ZERO_PROBABILITY",
            Error::IpfNotConverged { .. } => "E_IPF_NOT_CONVERGED",
            Error::BoundaryMinimum { .. } => "E_BOUNDARY_MINIMUM",
            Error::Infeasible { .. } => "E_INFEASIBLE",
            Error::NotSymmetric(_) => "E_NOT_SYMMETRIC",
            Error::NotPositiveDefinite(_) => "E_NOT_SPD",
            Error::RankDeficient => "E_RANK_DEFICIENT",
            Error::InsufficientData { .. } => "E_INSUFFICIENT_DATA",
            Error::NonFinite(_) => "E_NON_FINITE",
            Error::Schema(_) => "E_SCHEMA",
            Error::StateOutOfRange { .. } => "E_STATE_RANGE",
            Error::UnsupportedMeasure(_) => "E_UNSUPPORTED_MEASURE",
            Error::Optimization(_) => "E_OPTIMIZER",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_PARSE",
            Error::Csv(_) => "E_PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
