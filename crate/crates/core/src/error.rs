use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series logarithm needs constant term 1, got {0}")]
    NonUnitConstant(String),

    #[error("n = {n} is outside the available range {min}..={max}")]
    OutOfRange { n: i64, min: i64, max: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("checkpoint {path} is corrupt: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },

    /// Raised when a table entry fails to be a multiple of `3n + 2`, or when
    /// the recursion produces a non-integer. Always an implementation bug.
    #[error("integrality violated at (n, g) = ({n}, {g}): {detail}")]
    Integrality { n: usize, g: usize, detail: String },

    #[error("rotation-system census is limited to at most {limit} edges, got {n_edges}")]
    CensusTooLarge { n_edges: usize, limit: usize },

    #[error("exact division failed: {0}")]
    Divisibility(String),

    #[error("invalid regular family: {0}")]
    InvalidFamily(String),

    #[error("y = {y} is outside the supported domain {domain}")]
    Domain { y: f64, domain: &'static str },

    #[error("(n, g) = ({n}, {g}) gives (n - 2g)/ln n = {ratio:.4}, outside the window [{lo:.4}, {hi:.4}]")]
    OutsideWindow {
        n: usize,
        g: usize,
        ratio: f64,
        lo: f64,
        hi: f64,
    },

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("malformed number {0:?}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
