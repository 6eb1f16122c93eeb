use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed permutation {text:?}: {reason}")]
    MalformedPermutation { text: String, reason: String },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index {index} appears more than once")]
    DuplicateIndex { index: usize },

    #[error("transposition needs two distinct indices, got ({0}, {0})")]
    DegenerateTransposition(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (entry ({row}, {col}) differs by {diff:e})")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("matrix is not orthogonal (max deviation {0:e})")]
    NotOrthogonal(f64),

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(String),

    #[error("block decomposition leaked {leak:e} off the diagonal blocks (tolerance {tol:e})")]
    BlockLeakage { leak: f64, tol: f64 },

    #[error("gamma factor diverges: argument {argument} at k = {k} is not positive")]
    Divergent { k: usize, argument: f64 },

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("not enough observations: {0}")]
    TooFewObservations(String),

    #[error("non-finite value in input at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("enumerating cyclic subgroups for p = {p} exceeds the limit of {limit}")]
    EnumerationLimit { p: usize, limit: usize },

    #[error("maximum likelihood estimate does not exist: n_eff = {n_eff} < n0 = {n0}")]
    MleDoesNotExist { n_eff: usize, n0: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Parse { path: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for usage and validation problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotPositiveDefinite(_)
            | Error::BlockLeakage { .. }
            | Error::Divergent { .. }
            | Error::MleDoesNotExist { .. }
            | Error::NotOrthogonal(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
