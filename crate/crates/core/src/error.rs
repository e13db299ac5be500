//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("envelope is identically zero and cannot be normalized")]
    NotNormalizable,

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("negative envelope sample {value} at index {index}")]
    NegativeEnvelope { index: usize, value: f64 },

    #[error("sampled modes live on incompatible grids")]
    GridMismatch,

    #[error("aliasing risk: {0}")]
    AliasingRisk(String),

    #[error("both envelopes vanish at t0 = {t0}; cannot condition on an impossible detection")]
    ZeroDensityInstant { t0: f64 },

    #[error("degenerate inhomogeneous width: delta_omega must be > 0 here (use the delta_omega = 0 branch)")]
    DegenerateWidth,

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("quadrature not converged: {nodes} vs {refined} detuning nodes differ by {difference:.3e} (tolerance {tolerance:.1e})")]
    QuadratureNotConverged {
        nodes: usize,
        refined: usize,
        difference: f64,
        tolerance: f64,
    },

    #[error("rejection budget of {budget} proposals exceeded")]
    RejectionBudgetExceeded { budget: usize },

    #[error("histogram range is empty: {0}")]
    EmptyRange(String),

    #[error("too few events: {actual} (need at least {required})")]
    TooFewEvents { actual: usize, required: usize },

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
