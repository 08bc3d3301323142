use std::path::PathBuf;

use crate::PointId;

/// Errors raised across the learner, the stream loaders and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("projection variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("point {0} already has a site in the posterior")]
    DuplicatePoint(PointId),

    #[error("no site for point {0}")]
    UnknownSite(PointId),

    #[error("removing site {0} leaves a near-singular cavity")]
    NearSingularCavity(PointId),

    #[error("context buffer is empty")]
    EmptyBuffer,

    #[error("point {0} is not in the active set")]
    UnknownActivePoint(PointId),

    #[error("point {0} is not in the cache")]
    UnknownCachedPoint(PointId),

    #[error("label oracle returned no label for step {0}")]
    OracleFailure(u64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown policy `{0}` (expected voi_full, vop_only, random or uncertain)")]
    UnknownPolicy(String),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: expected {expected} features, found {found}")]
    DimensionInconsistent { line: usize, expected: usize, found: usize },

    #[error("line {line}: invalid label `{token}` (expected +1 or -1)")]
    InvalidLabel { line: usize, token: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
