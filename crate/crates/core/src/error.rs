use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("illegal action {0}")]
    IllegalAction(String),
    #[error("state is terminal")]
    TerminalState,
    #[error("state is not terminal")]
    NonTerminalState,
    #[error("distributions have different supports ({0} vs {1})")]
    SupportMismatch(usize, usize),
    #[error("total weight is zero")]
    ZeroTotalWeight,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("experience buffer is empty")]
    EmptyBuffer,
    #[error("sampling probability is zero")]
    ZeroProbability,
    #[error("experience tuple has no episode duration yet")]
    Unfinalized,
    #[error("search root has no visits")]
    ZeroVisits,
    #[error("empty input")]
    EmptyInput,
    #[error("{wins} wins out of {n} games")]
    WinsExceedGames { wins: u64, n: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
