use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("mesh quality: {0}")]
    MeshQuality(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{method} did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("positivity violated at index {index}: value {value:.6e}")]
    PositivityViolation { index: usize, value: f64 },

    #[error("positivity lost at node {node}: {quantity} = {value:.6e}")]
    PositivityLoss {
        node: usize,
        quantity: &'static str,
        value: f64,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("state invariant violated at step {step}: {detail}")]
    StateInvariant { step: usize, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
