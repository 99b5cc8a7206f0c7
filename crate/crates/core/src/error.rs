use alloc::string::String;

/// Errors reported by the measure, transport and registration routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("size mismatch: {left} atoms vs {right} atoms")]
    SizeMismatch { left: usize, right: usize },
    #[error("point cloud must hold at least one atom of dimension at least one")]
    Empty,
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("data length {len} is not a multiple of dimension {dim}")]
    RaggedData { len: usize, dim: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("direction is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("direction has zero length")]
    DegenerateDirection,
    #[error("cost matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("{n} atoms exceeds the exact solver limit of {limit}")]
    OracleGuard { n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("pixel {0} has a channel outside [0, 1]")]
    ChannelRange(usize),
    #[error("pixel {0} is not gray")]
    NotGray(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
