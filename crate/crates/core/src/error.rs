use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The integrator produced a non-finite state.
    #[error("simulation fault at t={t}: {reason}")]
    SimulationFault { t: f64, reason: String },

    #[error("trace sampling aborted after {attempts} attempts ({valid} of {wanted} valid traces)")]
    SamplingAborted {
        attempts: usize,
        valid: usize,
        wanted: usize,
    },

    /// The planner found no route to the landing target.
    #[error("no path: {0}")]
    NoPath(String),

    #[error("cannot learn discrepancy: {0}")]
    Degenerate(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            reason: reason.into(),
        }
    }
}
