//! Library half of the `freewalk` binary: argument parsing helpers, table
//! rendering, subcommand implementations, and the verification checklist.
//!
//! Exit-code contract for the binary: `0` success, `1` a verified identity
//! or checklist item failed (or an internal error), `2` malformed input or
//! an ill-posed request, `3` a work budget was exceeded.

use std::fmt;

use freewalk_core::{
    GreenError, MartinError, MeasureError, RationalParseError, RayError, SetsError, SpecParseError,
    StationaryError, WordError,
};

pub mod args;
pub mod checks;
pub mod output;
pub mod run;

/// What went wrong, coarsened to the exit-code classes.
#[derive(Debug)]
pub enum CliFailure {
    /// Malformed input or an ill-posed request → exit 2.
    Usage(String),
    /// A work budget was exceeded → exit 3.
    Budget(String),
    /// A verification failed → exit 1.
    Check(String),
}

impl CliFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliFailure::Check(_) => 1,
            CliFailure::Usage(_) => 2,
            CliFailure::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliFailure::Usage(msg) => write!(f, "{msg}"),
            CliFailure::Budget(msg) => write!(f, "budget exceeded: {msg}"),
            CliFailure::Check(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl std::error::Error for CliFailure {}

impl From<WordError> for CliFailure {
    fn from(e: WordError) -> Self {
        match e {
            WordError::EnumerationBudget { .. } => CliFailure::Budget(e.to_string()),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<MeasureError> for CliFailure {
    fn from(e: MeasureError) -> Self {
        match e {
            MeasureError::Budget { .. } => CliFailure::Budget(e.to_string()),
            MeasureError::Word(inner) => inner.into(),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<GreenError> for CliFailure {
    fn from(e: GreenError) -> Self {
        match e {
            GreenError::Measure(inner) => inner.into(),
            GreenError::Word(inner) => inner.into(),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<StationaryError> for CliFailure {
    fn from(e: StationaryError) -> Self {
        match e {
            StationaryError::Green(inner) => inner.into(),
            StationaryError::Measure(inner) => inner.into(),
            StationaryError::Word(inner) => inner.into(),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<MartinError> for CliFailure {
    fn from(e: MartinError) -> Self {
        match e {
            MartinError::Budget { .. } => CliFailure::Budget(e.to_string()),
            MartinError::Word(inner) => inner.into(),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<SetsError> for CliFailure {
    fn from(e: SetsError) -> Self {
        match e {
            SetsError::Budget { .. } => CliFailure::Budget(e.to_string()),
            SetsError::Word(inner) => inner.into(),
            SetsError::Ray(inner) => inner.into(),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<RayError> for CliFailure {
    fn from(e: RayError) -> Self {
        match e {
            RayError::Word(inner) => inner.into(),
            other => CliFailure::Usage(other.to_string()),
        }
    }
}

impl From<SpecParseError> for CliFailure {
    fn from(e: SpecParseError) -> Self {
        CliFailure::Usage(e.to_string())
    }
}

impl From<RationalParseError> for CliFailure {
    fn from(e: RationalParseError) -> Self {
        CliFailure::Usage(e.to_string())
    }
}
