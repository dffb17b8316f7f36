use thiserror::Error;

/// Argument errors from the special-function layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("argument {0} is not finite")]
    NonFinite(f64),
    #[error("argument {0} must be positive")]
    NonPositive(f64),
    #[error("order {0} outside the supported range |n| <= 60")]
    OrderOutOfRange(i32),
    #[error("argument {0} outside the supported range x <= 200")]
    ArgumentOutOfRange(f64),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("fundamental solution evaluated at coincident points")]
    Singular,
    #[error("truncation order {n_max} aliases on {samples} samples (need n_max <= {})", (samples / 2).saturating_sub(1))]
    Aliasing { n_max: usize, samples: usize },
    #[error("neumann data required but not populated")]
    MissingNeumann,
    #[error("reconstruction impossible at k = {k}: degenerate modes {modes:?}")]
    Degenerate { k: f64, modes: Vec<i64> },
    #[error("relative error undefined: exact function has zero norm")]
    ZeroNorm,
    #[error("quadrature not converged: relative change {change:e} exceeds {tolerance:e}")]
    QuadratureNotConverged { change: f64, tolerance: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
