use thiserror::Error;

/// Errors surfaced by solvers, quadratures and configuration handling.
#[derive(Debug, Error)]
pub enum HomogError {
    #[error("linear solver stalled after {iterations} iterations: relative residual {residual:.3e} (target {target:.3e}); residual tail {history:?}")]
    SolverDiverged {
        iterations: usize,
        residual: f64,
        target: f64,
        history: Vec<f64>,
    },

    #[error("incompatible data: |mean| = {mean:.3e} exceeds {tolerance:.3e} x scale")]
    IncompatibleData { mean: f64, tolerance: f64 },

    #[error("quadrature did not reach the requested accuracy {requested:.3e} (achieved {achieved:.3e})")]
    QuadratureFailure { requested: f64, achieved: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, HomogError>;

impl From<serde_json::Error> for HomogError {
    fn from(e: serde_json::Error) -> Self {
        HomogError::Serialization(e.to_string())
    }
}
