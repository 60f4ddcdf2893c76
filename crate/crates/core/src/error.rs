use thiserror::Error;

use crate::Vec3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("laser clearance violated: {0}")]
    Clearance(String),

    #[error("point {point:?} lies within the singular radius of segment {segment}")]
    SingularPoint { point: Vec3, segment: usize },

    #[error("every sample point was singular")]
    EmptySample,

    #[error("field minimum lies on the search boundary at {0:?}")]
    ZeroNotBracketed(Vec3),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("objective evaluation failed: {0}")]
    ObjectiveEvaluation(String),

    #[error("initial point is infeasible: {0}")]
    InfeasibleStart(String),
}

impl Error {
    pub(crate) fn invalid_geometry(msg: impl Into<String>) -> Self {
        Self::InvalidGeometry(msg.into())
    }

    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }
}
