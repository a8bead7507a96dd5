use thiserror::Error;

use crate::graph::{NodeId, RegionId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),

    #[error("graph contains a cycle: {}", render_cycle(.cycle))]
    Cyclic { cycle: Vec<NodeId> },

    #[error("map belongs to region {found}, expected {expected}")]
    RegionMismatch { expected: RegionId, found: RegionId },

    #[error("map over region {0} is not verified good")]
    NotGood(RegionId),

    #[error("invalid score table: {0}")]
    InvalidScores(String),

    #[error("expression syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn render_cycle(cycle: &[NodeId]) -> String {
    cycle
        .iter()
        .map(|n| n.as_str())
        .collect::<Vec<_>>()
        .join(" -> ")
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn syntax(position: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            position,
            message: message.into(),
        }
    }
}
