use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument lies outside the model's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Some nodes can never receive the update.
    #[error("unreachable topology: {reachable} of {total} nodes reachable from the announcer")]
    Unreachable { reachable: usize, total: usize },

    /// The transit branch of a tiered core has no provider links.
    #[error("unreachable transit: {0}")]
    UnreachableTransit(String),

    /// An expected bgp-degree fell below the configured floor.
    #[error("model degenerate at step i={step}, x={x}: bgp-degree {degree:e} below floor {floor:e}")]
    Degenerate {
        step: usize,
        x: usize,
        degree: f64,
        floor: f64,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A Monte Carlo run failed.
    #[error("run {index}: {source}")]
    Run { index: usize, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for command-line front ends.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Degenerate { .. } | Error::Parse { .. } => 2,
            Error::Unreachable { .. } | Error::UnreachableTransit(_) => 3,
            Error::Io(_) => 4,
            Error::Run { source, .. } => source.exit_code(),
        }
    }
}
