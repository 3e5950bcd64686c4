//! Crate-wide error type.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed region: zero normal, negative squared radius, or a
    /// dimension mismatch between constraints and points.
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    /// An operation that needs a nonempty region was given an empty one.
    #[error("region is infeasible")]
    InfeasibleRegion,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A task exceeds a documented size cap (e.g. the mean-absolute
    /// criterion's sign-pattern cap).
    #[error("task too large: {0}")]
    TaskTooLarge(String),

    /// The algorithm consumes raw atoms, not just satisfaction regions,
    /// so it has no region-fed counterpart.
    #[error("algorithm not liftable: {0}")]
    NotLiftable(String),

    /// An arrangement exceeds the cell-enumeration caps.
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("invalid stream spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
