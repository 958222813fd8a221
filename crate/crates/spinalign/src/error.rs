//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad term dimension: {0}")]
    BadTermDimension(String),
    #[error("matrix is not self-adjoint within tolerance")]
    NotHermitian,
    #[error("decomposition failed")]
    DecompositionFailed,
    #[error("rank out of range: {rank} not in 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(usize),
    #[error("not comparable: majorization precondition failed")]
    NotComparable,
    #[error("non-unjust transfer supplied")]
    NotUnjust,
    #[error("not spectrally comparable")]
    SpectraMismatch,
    #[error("factors do not commute within tolerance")]
    NonCommuting,
    #[error("input is not a projector within tolerance")]
    NotProjector,
    #[error("infeasible: r1+r2-d > floor(c)")]
    Infeasible,
    #[error("objective subsets do not form a partition of the sites")]
    NotPartition,
    #[error("enumeration too large: {size} exceeds cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("dimension cap exceeded: {dim} > {cap}")]
    CapExceeded { dim: usize, cap: usize },
    #[error("missing state for subset {0}")]
    MissingTupleEntry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
