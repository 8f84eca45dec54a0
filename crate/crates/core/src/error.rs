use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of supported range: {0}")]
    Range(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("point {0:?} is not on the shell")]
    OffShell(Vec<i64>),

    #[error("vertices {0:?} and {1:?} are antipodal")]
    Antipodal(Vec<i64>, Vec<i64>),

    #[error("degenerate simplex: affine rank {rank} < {required}")]
    Degenerate { rank: usize, required: usize },

    #[error("resource guard exceeded: {0}")]
    Resource(String),

    #[error("grid of size {m} aliases frequencies up to {max_freq}; need M > {required}")]
    Aliasing { m: usize, max_freq: i64, required: i64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
