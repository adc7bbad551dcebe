use alloc::string::String;

use crate::docmodel::DocKind;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid location {0}")]
    InvalidLocation(String),
    #[error("enclosing region of an empty location set")]
    EmptyLocations,
    #[error("document kind mismatch: expected {expected:?}, found {found:?}")]
    KindMismatch { expected: DocKind, found: DocKind },
    #[error("invalid text box {index}: {reason}")]
    InvalidBox { index: usize, reason: String },
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("landmark {landmark:?} not found in document {doc}")]
    LandmarkNotFound { landmark: String, doc: usize },
    #[error("no landmark candidate shared by every document of cluster {cluster}")]
    NoLandmark { cluster: usize },
    #[error("region synthesis failed on document {doc}: {reason}")]
    RegionSynthesis { doc: usize, reason: String },
    #[error("value synthesis failed on example {example}: {reason}")]
    ValueSynthesis { example: usize, reason: String },
    #[error("synthesis produced no extraction tuple")]
    NoTuples,
}
