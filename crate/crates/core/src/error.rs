use thiserror::Error;

pub type Result<T> = std::result::Result<T, CmcError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CmcError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("normal graph degenerate: |u| = {max_abs_u} reaches the guard {limit}")]
    GraphDegenerate { max_abs_u: f64, limit: f64 },
    #[error("degenerate metric at node (t index {j}, s index {i})")]
    DegenerateMetric { j: usize, i: usize },
    #[error("no critical length: the cylinder is stable for every length")]
    NoCriticalLength,
    #[error("no bifurcation: {0}")]
    NoBifurcation(String),
    #[error("tangent pole inside bracket near c = {0}")]
    PoleInBracket(f64),
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("kernel dimension {0} is not one")]
    DegenerateKernel(usize),
    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),
    #[error("continuation stalled: step size {ds} below minimum {ds_min}")]
    ContinuationStalled { ds: f64, ds_min: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}
