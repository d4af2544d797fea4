use thiserror::Error;

use crate::model::TaskId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid speedup spec: {0}")]
    InvalidSpec(String),

    #[error("invalid task graph: {0}")]
    InvalidGraph(String),

    /// The allocation policy produced a processor count outside `[1, P]`.
    #[error("policy allocated {procs} processors to task {task} on a platform of {platform}")]
    PolicyOutOfRange {
        task: TaskId,
        procs: usize,
        platform: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("instance too large for the exact oracle: {0}")]
    OracleSize(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("policy refused: {0}")]
    PolicyRefused(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
