use thiserror::Error;

/// Errors raised by the streaming builder.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("capacity exceeded: {capacity} entries reserved, nnz estimate was too small")]
    CapacityExceeded { capacity: usize },
    #[error("index {index} out of bounds for inner dimension {inner}")]
    IndexOutOfBounds { index: usize, inner: usize },
    #[error("index {index} not greater than previous index {previous} in the current row")]
    OutOfOrder { index: usize, previous: usize },
    #[error("all {outer} rows already finalized")]
    RowsExhausted { outer: usize },
    #[error("only {finalized} of {outer} rows finalized")]
    Incomplete { finalized: usize, outer: usize },
    #[error("builder orientation does not match the requested format")]
    WrongOrientation,
}

/// Violations of the compressed storage invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("pointer array has length {len}, expected {expected}")]
    PointerLength { len: usize, expected: usize },
    #[error("pointer array must start at 0")]
    PointerStart,
    #[error("pointer array decreases at position {pos}")]
    PointerDecreasing { pos: usize },
    #[error("last pointer {last} does not match nnz {nnz}")]
    PointerEnd { last: usize, nnz: usize },
    #[error("index and value arrays differ in length ({indices} vs {values})")]
    LengthMismatch { indices: usize, values: usize },
    #[error("index {index} in line {line} exceeds inner dimension {inner}")]
    IndexOutOfBounds {
        line: usize,
        index: usize,
        inner: usize,
    },
    #[error("indices in line {line} are not strictly increasing")]
    Unsorted { line: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {lhs_rows}x{lhs_cols} times {rhs_rows}x{rhs_cols}")]
    DimensionMismatch {
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("matrix market: {0}")]
    MatrixMarket(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
