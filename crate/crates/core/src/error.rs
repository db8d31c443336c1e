use std::path::PathBuf;

/// Errors produced by the solvers, transforms and report writers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("grids do not match")]
    GridMismatch,

    #[error("non-uniform grid rejected by the mode discretization")]
    NonUniformGrid,

    #[error("no bracket found for the shooting parameter: {0}")]
    NoBracket(String),

    #[error("shooting search failed after {iterations} bisections: {reason}")]
    SearchFailed { iterations: usize, reason: String },

    #[error("found {found} zeros of the initial value problem, {required} required")]
    InsufficientZeros { found: usize, required: usize },

    #[error("integration diverged at r = {radius} (|u| exceeded {bound})")]
    Diverged { radius: f64, bound: f64 },

    #[error("discretization alarm, refine the grid: {0}")]
    DiscretizationAlarm(String),

    #[error("{context}: {source}")]
    Io {
        context: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input in {context}: {reason}")]
    Parse { context: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
