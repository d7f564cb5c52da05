//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LgbsError {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("subshift is empty after essentialization")]
    EmptySubshift,

    #[error("exact profile computation unavailable for this presentation kind: {0}")]
    ExactnessUnavailable(String),

    #[error("bounded-context approximation required: {0}")]
    ApproximationRequired(String),

    #[error("invalid bisystem: {0}")]
    InvalidBisystem(String),

    #[error("square completion is ambiguous at {0} (resolving property violated and no explicit bijection supplied)")]
    AmbiguousSquares(String),

    #[error("no completing square for corner {0}")]
    NoSquare(String),

    #[error("word is not in the predecessor set of the corner vertex: {0}")]
    WordNotInP(String),

    #[error("bisystem is inconsistent: {0}")]
    InconsistentBisystem(String),

    #[error("zigzag or window data exhausted: {0}")]
    DepthExhausted(String),

    #[error("partition law violated in a widening matrix: {0}")]
    PartitionViolation(String),

    #[error("stage schedule is not a refinement chain: {0}")]
    ScheduleNotChained(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl LgbsError {
    /// Exit-code class for the CLI: input errors vs internal invariant faults.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            LgbsError::InconsistentBisystem(_) | LgbsError::PartitionViolation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, LgbsError>;
