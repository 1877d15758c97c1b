use thiserror::Error;

use crate::coordmap::Point;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid agent name `{0}`")]
    InvalidAgent(String),

    #[error("invalid event {event}: {reason}")]
    InvalidEvent { event: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("event {event} refused by {blocker}")]
    Refused { event: String, blocker: String },

    #[error("maps conflict at {} cell(s): {coords:?}", coords.len())]
    MergeConflict { coords: Vec<Point> },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
