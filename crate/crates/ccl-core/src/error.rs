use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node count {0} is not a perfect fourth power; pad the graph first")]
    PaddingRequired(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("protocol violation in phase `{phase}` at round {round}: {msg}")]
    ProtocolViolation { phase: String, round: u64, msg: String },

    #[error("routing precondition violated: {0}")]
    RoutingPrecondition(String),

    #[error("sampling abort in {phase}: {msg}")]
    SamplingAbort { phase: String, msg: String },

    #[error("infeasible instance: {0}")]
    Infeasible(String),

    #[error("instance too large for the exact oracle: {0}")]
    TooLarge(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Algorithmic failures are the probabilistic or infeasibility outcomes,
    /// as opposed to bad input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(self, Error::SamplingAbort { .. } | Error::Infeasible(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
