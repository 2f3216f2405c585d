use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex index {0} out of range")]
    VertexIndex(usize),
    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("negative time t = {0}")]
    NegativeTime(f64),
    #[error("nonpositive time t = {0}")]
    NonPositiveTime(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis not certified: {0}")]
    Uncertified(String),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
    #[error("eigensolver did not converge: {0}")]
    Eigen(String),
    #[error("matrix not positive definite at pivot {pivot} (value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
