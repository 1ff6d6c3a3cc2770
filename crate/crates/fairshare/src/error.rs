use thiserror::Error;

/// Everything that can go wrong across the library.
///
/// Input and configuration problems are reported as their own variants so a
/// front end can distinguish "your problem file is bad" from "the solver gave
/// up"; see the CLI's exit-code mapping.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input points do not describe a convex set: {0}")]
    NonConvexInput(String),

    #[error("feasible set has empty interior")]
    DegenerateSet,

    #[error("disagreement point lies outside the feasible set")]
    DisagreementOutside,

    #[error("no strictly dominating point: normalization is degenerate")]
    DegenerateNormalization,

    #[error("operation requires a normalized problem")]
    NotNormalized,

    #[error("operation requires a comprehensive feasible set")]
    NotComprehensive,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("segment count {0} is too small")]
    InvalidSegmentCount(usize),

    #[error("invalid norm exponent p = {0}; need p >= 1")]
    InvalidP(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("relaxation did not converge: residual {residual:.3e} after {sweeps} sweeps")]
    NoConvergence { sweeps: u64, residual: f64 },

    #[error("probe disk leaves the solver domain")]
    DiskOutsideDomain,

    #[error("perturbation disk leaves the feasible set")]
    DiskOutsideFeasible,

    #[error("walker {walker} exceeded the move budget")]
    MaxMovesExceeded { walker: u64 },

    #[error("walk started on the absorbing boundary")]
    BoundaryStart,

    #[error("unknown variant `{0}`")]
    UnknownVariant(String),

    #[error("malformed check instance: {0}")]
    MalformedInstance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
