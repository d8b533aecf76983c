use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("graph too large: {0}")]
    Size(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("matrix not symmetric (deviation {0:e})")]
    Asymmetric(f64),
    #[error("non-positive off-diagonal entry a[{index}] = {value}")]
    NonPositiveOffDiagonal { index: usize, value: f64 },
    #[error("ball of radius {radius} around {center} reaches the truncation boundary")]
    BallExceedsGraph { center: usize, radius: usize },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("girth target {target} not reached for block of size {size}; best girth found {best}")]
    Generation { size: usize, target: usize, best: usize },
    #[error("potential is not spherically symmetric: level {level} has values {first} and {other}")]
    NotSpherical { level: usize, first: f64, other: f64 },
    #[error("evaluation point {0} lies on the cut")]
    OnCut(String),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("unknown experiment: {0}")]
    UnknownExperiment(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
