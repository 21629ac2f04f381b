//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site ({0}, {1}) is outside the bulk quadrant (need k >= 1 and l >= 1)")]
    OutsideBulk(i64, i64),

    #[error("anti-diagonal point [{x}]_{t} leaves the quadrant (need |x| <= t)")]
    OutsideQuadrant { x: f64, t: f64 },

    #[error("endpoints not ordered: ({0}, {1}) must be <= ({2}, {3}) coordinate-wise")]
    UnorderedEndpoints(i64, i64, i64, i64),

    #[error("density parameter rho = {0} must lie in (0, 1)")]
    InvalidRho(f64),

    #[error("invalid tilt parameters: {0}")]
    InvalidTilt(String),

    #[error("empty target set")]
    EmptyTargets,

    #[error("target ({0}, {1}) dominates no concave corner of the profile")]
    NoCornerBelow(i64, i64),

    #[error("field does not cover the requested domain: {0}")]
    CoverageShortfall(String),

    #[error("operation requires a boundary-mode field (got curve mode)")]
    NotBoundaryMode,

    #[error("operation requires full storage (field was computed frontier-only)")]
    NotFullStorage,

    #[error("exit labels were not tracked for this field")]
    NoExitLabels,

    #[error("brute-force oracle limited to boxes of side <= {max}, got {got}")]
    OracleTooLarge { max: i64, got: i64 },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("simulation window exhausted: {0}")]
    WindowExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;
