use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A node or step index outside the admissible range.
    #[error("index {index} out of range {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },

    /// A series or iteration failed to reach its tolerance.
    #[error("convergence failure after {terms} terms (tail estimate {tail:e}): {what}")]
    Convergence {
        what: String,
        terms: usize,
        tail: f64,
    },

    /// Intermediate quantities left the representable range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Quadrature resolution is too coarse for the requested number of modes.
    #[error("resolution error: {points} quadrature points for {modes} modes (need >= {required})")]
    Resolution {
        points: usize,
        modes: usize,
        required: usize,
    },

    /// A step was requested before the history it depends on exists.
    #[error("history incomplete: step {requested} needs steps up to {needed}, have {available}")]
    HistoryIncomplete {
        requested: usize,
        needed: usize,
        available: usize,
    },

    /// Linear solve failure (non-positive pivot) at a given time step.
    #[error("solver failure at step {step}: {reason}")]
    Solver { step: usize, reason: String },

    /// Invalid scenario configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A violated call contract (e.g. undefined discrete convolution at node 0).
    #[error("contract violation: {0}")]
    Contract(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures of a numerical procedure to converge.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::Overflow(_))
    }
}
