use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("moment sequence covers degree {available}, but degree {required} is required")]
    InsufficientDegree { required: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: entry ({row},{col}) = {upper} but ({col},{row}) = {lower}")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: String,
        lower: String,
    },

    #[error("polynomial degree {degree} exceeds the allowed bound {bound}")]
    DegreeTooHigh { degree: usize, bound: usize },

    #[error("simplex vertices are affinely dependent")]
    DegenerateSimplex,

    #[error("cone generator matrix is singular")]
    SingularBasis,

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("entry magnitude does not fit in f64; convert with normalization enabled")]
    NonFinite,

    #[error("eigensolver did not converge within {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("internal consistency violated: {0}")]
    Inconsistent(String),

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
