use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("region too small: {0}")]
    RegionTooSmall(String),
    #[error("site set {0} is empty")]
    EmptySiteSet(&'static str),
    #[error("target unreachable inside the confinement")]
    Unreachable,
    #[error("assignment does not match region: {0}")]
    AssignmentMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("malformed configuration dump: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
