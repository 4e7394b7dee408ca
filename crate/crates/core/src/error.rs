use std::path::PathBuf;

use crate::game::{Action, GridPos, PlayerId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("maze parse error at line {line}, column {column}: {message}")]
    MazeSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid maze field `{field}`: {message}")]
    MazeField { field: String, message: String },

    #[error("invalid maze: {0}")]
    InvalidMaze(String),

    #[error("invalid game config: {0}")]
    InvalidConfig(String),

    #[error("goal {goal:?} unreachable from {init:?} in the combined maze")]
    Unreachable { init: GridPos, goal: GridPos },

    #[error("no valid maze pair found for seed {seed} after {attempts} attempts")]
    GenerationExhausted { seed: u64, attempts: u32 },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("invalid intent: {0}")]
    InvalidIntent(String),

    #[error("history entries must be movement actions, got {0:?}")]
    SwitchInHistory(Action),

    #[error("unknown {what} `{value}`")]
    UnknownName { what: &'static str, value: String },

    #[error("player {player:?} attempted {action:?} at {cell:?}, which is blocked on its maze side")]
    ProtocolViolation {
        player: PlayerId,
        cell: GridPos,
        action: Action,
    },

    #[error("job {job}: {source}")]
    Job {
        job: String,
        #[source]
        source: Box<Error>,
    },

    #[error("statistics: {0}")]
    Stats(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
