use thiserror::Error;

/// Errors produced by the fdmap library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),

    #[error("least-squares fit onto the {basis} basis is rank deficient (rank {rank} < {n_basis})")]
    SingularFit {
        basis: String,
        rank: usize,
        n_basis: usize,
    },

    #[error("kernel bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("neighbourhood graph is disconnected ({components} connected components)")]
    DisconnectedGraph { components: usize },

    #[error("transition matrix has a zero row sum at row {row}")]
    ZeroDegree { row: usize },

    #[error(
        "metric matrix is not invertible (eigenvalues span [{min_eigenvalue:e}, {max_eigenvalue:e}])"
    )]
    NonInvertibleMetric {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("scorer mismatch: {0}")]
    ScorerMismatch(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
