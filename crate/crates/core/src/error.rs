use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("nonlinearity is already truncated")]
    AlreadyTruncated,
    #[error("solution stays positive up to s_max = {s_max}")]
    NoZero { s_max: f64 },
    #[error("step control underflow (step {step:e})")]
    StiffFailure { step: f64 },
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("potential is unbounded at the origin; a positive r_min is required")]
    SingularPotential,
    #[error("sub/supersolution pair is not bracketing at node {node}")]
    NotBracketed { node: usize },
    #[error("iterate left the order interval at iteration {iteration}, node {node}")]
    MonotonicityViolation { iteration: usize, node: usize },
    #[error("branch tail has {len} points, at least {needed} required")]
    InsufficientTail { len: usize, needed: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used when failures are recorded instead of raised.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::AlreadyTruncated => "already_truncated",
            Error::NoZero { .. } => "no_zero",
            Error::StiffFailure { .. } => "stiff_failure",
            Error::NoConvergence { .. } => "no_convergence",
            Error::SingularPotential => "singular_potential",
            Error::NotBracketed { .. } => "not_bracketed",
            Error::MonotonicityViolation { .. } => "monotonicity_violation",
            Error::InsufficientTail { .. } => "insufficient_tail",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    /// True for failures of a numerical method, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoZero { .. }
                | Error::StiffFailure { .. }
                | Error::NoConvergence { .. }
                | Error::SingularPotential
                | Error::NotBracketed { .. }
                | Error::MonotonicityViolation { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
