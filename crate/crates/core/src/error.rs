use thiserror::Error;

use crate::model::ArmId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown arm id {0}")]
    InvalidArm(ArmId),

    #[error("pull count must be at least 1")]
    InvalidBudget,

    #[error("lattice spacing must be positive and finite, got {0}")]
    InvalidEta(f64),

    #[error("no arms inside the requested interval")]
    EmptyArmSet,

    #[error("algorithm requires dimension {expected}, instance has {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("invalid hitting set: {0}")]
    InvalidHittingSet(String),

    #[error("arm {0} is not inside the interval under verification")]
    InvalidWitness(ArmId),

    #[error("oracle limited to {max} intervals, got {found}")]
    OracleScaleExceeded { found: usize, max: usize },

    #[error("invalid epsilon {0}: 1/(8*eps) must be an integer")]
    InvalidEps(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("could not decode a unique arm for group {group}")]
    DecodeFailure { group: usize },

    #[error("experiment configs do not share an instance")]
    ConfigMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
