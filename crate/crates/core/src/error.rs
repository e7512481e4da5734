use thiserror::Error;

/// Errors produced by the library. Variants are grouped by the CLI into
/// domain errors and resource errors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rank {0}: rank must be at least 1")]
    InvalidRank(usize),
    #[error("weight has {got} coordinates, rank {rank} requires {rank}")]
    DimensionMismatch { rank: usize, got: usize },
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
    #[error("q-number of negative argument {0}")]
    NegativeQNumber(i64),
    #[error("q must satisfy 0 < q < 1, got {0}")]
    InvalidQ(f64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("polynomial division leaves a nonzero remainder")]
    NonExactDivision,
    #[error("exponent query on the zero polynomial")]
    EmptyPolynomial,
    #[error("invalid highest-weight family: {0}")]
    InvalidFamily(String),
    #[error("row index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("invalid parameter: {0}")]
    Domain(String),
    #[error("pattern count exceeds the cap of {cap}")]
    ResourceCap { cap: u64 },
    #[error("spectral-dimension estimate failed: {0}")]
    Estimation(String),
    #[error("zeta evaluation did not converge at s = {s}")]
    NotConverged { s: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by exceeding a computational budget.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceCap { .. } | Error::Estimation(_) | Error::NotConverged { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
