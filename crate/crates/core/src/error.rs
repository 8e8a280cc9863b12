use std::io;

/// Errors raised anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("odd stub count {0}: stubs must pair up")]
    OddStubCount(usize),

    #[error("odd degree sum {0}")]
    OddDegreeSum(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("initial snapshot has no edges")]
    EmptyInitialGraph,

    #[error("snapshot {0} has no edges; survival ratio undefined")]
    EmptySnapshot(usize),

    #[error("need at least {needed} snapshots, got {got}")]
    TooFewSnapshots { needed: usize, got: usize },

    #[error("window of {window} steps does not fit in {steps} steps")]
    WindowTooLarge { window: usize, steps: usize },

    #[error("infeasible moments m1={m1}, m2={m2}: {reason}")]
    InfeasibleMoments {
        m1: String,
        m2: String,
        reason: &'static str,
    },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Coarse classification used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    InfeasibleFit,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InfeasibleMoments { .. } => ErrorKind::InfeasibleFit,
            Error::Parse { .. } | Error::Data(_) | Error::Io(_) => ErrorKind::Data,
            Error::EmptyInitialGraph
            | Error::EmptySnapshot(_)
            | Error::TooFewSnapshots { .. }
            | Error::InvalidGraph(_) => ErrorKind::Data,
            _ => ErrorKind::Usage,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
