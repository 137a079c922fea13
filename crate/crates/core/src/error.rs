use num_complex::Complex64;
use thiserror::Error;

/// Which pole family an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Z,
    W,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Z => f.write_str("z"),
            Family::W => f.write_str("w"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument {arg} lies within {eps:e} of a kernel pole")]
    PoleProximity { arg: Complex64, eps: f64 },

    #[error(
        "strip condition violated by pole {family}[{index}] at t = {time} (margin {margin:e})"
    )]
    StripViolation {
        time: f64,
        family: Family,
        index: usize,
        margin: f64,
    },

    #[error("singular pole configuration at t = {time}: {family}[{index}] ({detail})")]
    SingularConfiguration {
        time: f64,
        family: Family,
        index: usize,
        detail: String,
    },

    #[error("pole a[{index}] = {value} outside the admissible window: {reason}")]
    WindowViolation {
        index: usize,
        value: Complex64,
        reason: String,
    },

    #[error("elliptic pole data requires M = N, got N = {n}, M = {m}")]
    PoleCountMismatch { n: usize, m: usize },

    #[error("integrator step size underflow at t = {time} (dt = {dt:e})")]
    StepFailure { time: f64, dt: f64 },

    #[error("integrator exceeded {max_steps} steps at t = {time}")]
    MaxStepsExceeded { time: f64, max_steps: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("spectral evolution unstable at t = {time}: max |field| = {max_abs:e}")]
    Instability { time: f64, max_abs: f64 },

    #[error("tau function vanishes on the grid at x = {x} (factor {index})")]
    PoleOnGrid { x: f64, index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
