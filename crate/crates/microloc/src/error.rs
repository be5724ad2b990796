use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("too few dyadic scales: need n_max - n_min >= {min}, got {got}")]
    TooFewScales { min: usize, got: usize },

    #[error("depth {depth} too small for truncation tolerance {tol:e}; minimal depth is {min_depth}")]
    DepthTooSmall { depth: usize, min_depth: usize, tol: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
