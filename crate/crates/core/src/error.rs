use thiserror::Error;

use crate::component::ComponentId;
use crate::geometry::{Family, ObjectId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("family mismatch: expected {expected}, found {found}")]
    FamilyMismatch { expected: Family, found: Family },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("coordinate {0} is outside the supported range [-2^20, 2^20]")]
    CoordinateOutOfRange(i64),

    #[error("axis segment overlaps a collinear segment on the same line ({0})")]
    CollinearOverlap(String),

    #[error("edge ({0}, {1}) references an undeclared vertex")]
    MalformedGraph(usize, usize),

    #[error("unknown component {0}")]
    MissingComponent(ComponentId),

    #[error("component {0} is already present")]
    DuplicateComponent(ComponentId),

    #[error("unknown or deleted object {0}")]
    UnknownObject(ObjectId),

    #[error("separator needs at least 25 disks, got {0}")]
    InstanceTooSmall(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
