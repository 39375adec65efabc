use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position {k} is outside 1..=2^{n}")]
    PositionOutOfRange { k: u64, n: usize },

    #[error("weight index {index} is outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("instance has no weights")]
    EmptyWeights,

    #[error("|t| + sum |w| must stay below 2^62")]
    MagnitudeBound,

    #[error("subset {indices:?} sums to {sum}, not the target {target}")]
    NotASolution {
        indices: Vec<usize>,
        sum: i64,
        target: i64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} is {got}, above the limit of {limit}")]
    Resource {
        what: &'static str,
        got: u64,
        limit: u64,
    },

    #[error("time budget exhausted")]
    TimedOut,
}

/// Coarse classification, used for exit codes and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Parse,
    Precondition,
    Resource,
    Timeout,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::EmptyWeights | Error::MagnitudeBound => ErrorKind::Parse,
            Error::Config(_) => ErrorKind::Usage,
            Error::PositionOutOfRange { .. }
            | Error::IndexOutOfRange { .. }
            | Error::NotASolution { .. }
            | Error::Precondition(_) => ErrorKind::Precondition,
            Error::Resource { .. } => ErrorKind::Resource,
            Error::TimedOut => ErrorKind::Timeout,
        }
    }
}
