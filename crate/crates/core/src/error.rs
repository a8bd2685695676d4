use std::path::PathBuf;

use crate::net::{NodeId, SwitchId};
use crate::workload::GroupId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("unknown switch {0}")]
    UnknownSwitch(SwitchId),

    #[error("unknown group id {0}")]
    UnknownGroup(GroupId),

    #[error("group id {0} already present")]
    DuplicateGroup(GroupId),

    #[error("invalid group {group}: {msg}")]
    InvalidGroup { group: GroupId, msg: String },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("oracle refused: {groups} groups exceeds bound of {bound}")]
    OracleTooLarge { groups: usize, bound: usize },

    #[error("switch {switch} needs {used} slots but has capacity {capacity}")]
    CapacityViolation {
        switch: SwitchId,
        used: u64,
        capacity: u64,
    },

    #[error("switch {switch}: rule tables use {used} slots, placement accounted {accounted}")]
    AccountingMismatch {
        switch: SwitchId,
        used: u64,
        accounted: u64,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
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
