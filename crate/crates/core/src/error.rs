use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("invalid argument `{arg}`: {reason}")]
    InvalidArgument { arg: &'static str, reason: String },

    #[error("painless condition violated: b = {b} exceeds 1/|I| = {limit}")]
    PainlessViolated { b: f64, limit: f64 },

    #[error("envelope check failed: {0}")]
    EnvelopeInvalid(String),

    #[error("combinatorial budget exceeded: {required} patterns, budget {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("system not invertible on the signal support: multiplier {value:.3e} at gamma = {gamma}")]
    NotInvertible { gamma: f64, value: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("not a fusion frame: {0}")]
    NotAFusionFrame(String),

    #[error("not an information packet for this input: {0}")]
    NotAnInformationPacket(String),

    #[error("mismatched grids: {0}")]
    GridMismatch(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, FrameError>;

impl FrameError {
    pub(crate) fn invalid(arg: &'static str, reason: impl Into<String>) -> Self {
        FrameError::InvalidArgument {
            arg,
            reason: reason.into(),
        }
    }
}
