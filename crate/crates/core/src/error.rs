use crate::rat::RatParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional (affine dimension {affine_dim} < {dim})")]
    LowerDimensional { dim: usize, affine_dim: usize },
    #[error("point {point:?} is not in the {k}-th dilate of the polytope")]
    NotInPolytope { point: Vec<i64>, k: u64 },
    #[error("invalid piecewise-linear function: {0}")]
    InvalidPl(String),
    #[error("vertex {0} is not a smooth (Delzant) corner")]
    NotDelzant(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("level {k} is not a multiple of the divisibility period {period}")]
    Divisibility { k: u64, period: u64 },
    #[error("interpolation inconsistent at k = {k}: predicted {predicted}, counted {counted} (rounding-convention artifact)")]
    Interpolation { k: u64, predicted: String, counted: String },
    #[error("empty effective domain")]
    EmptyDomain,
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error(transparent)]
    Rat(#[from] RatParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema { pointer: pointer.into(), message: message.into() }
    }
}
