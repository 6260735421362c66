use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("lattice with d = {dim}, n = {side} overflows the addressable state size")]
    DimensionOverflow { dim: usize, side: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate out of range [0, {side}): got {value} on axis {axis}")]
    CoordinateOutOfRange { axis: usize, value: i64, side: usize },

    #[error("vertex has {got} coordinates, lattice dimension is {expected}")]
    WrongArity { expected: usize, got: usize },

    #[error("duplicate marked vertex {0:?}")]
    DuplicateMark(Vec<usize>),

    #[error("too many marked vertices: {count} exceeds the limit {limit}")]
    TooManyMarks { count: usize, limit: usize },

    #[error("lambda {0} outside [0, 2]")]
    LambdaOutOfRange(f64),

    #[error("mark index {index} out of range ({len} marks)")]
    MarkIndex { index: usize, len: usize },

    #[error("dense operator of size {size} exceeds the cap {cap}")]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("degenerate Bloch mode {kappa:?}: channel polarization is not unique")]
    DegenerateMode { kappa: Vec<usize> },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("scenario schema violation at line {line}, column {column}, field `{field}`: {message}")]
    Schema {
        field: String,
        message: String,
        line: usize,
        column: usize,
    },

    #[error("{field}: {source}")]
    Field {
        field: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown keys in scenario: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, source: Error) -> Self {
        Error::Field {
            field: field.into(),
            source: Box::new(source),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
