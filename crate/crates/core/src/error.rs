use thiserror::Error;

/// Errors raised by the exact engines, bound evaluators, samplers and the sweep harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("invalid rational `{0}` (expected `p/q` or an integer)")]
    ParseRational(String),

    #[error("invalid interval `{0}`")]
    InvalidInterval(String),

    #[error("length mismatch: w has {w} coordinates, v has {v}")]
    LengthMismatch { w: usize, v: usize },

    #[error("n = {n} exceeds the exact-enumeration cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("coordinates must be pairwise distinct")]
    RepeatedCoordinates,

    #[error("k = {k} is out of range for n = {n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("value does not fit the integer grid")]
    GridOverflow,

    #[error("grid mismatch: interval and distribution use different value grids")]
    GridMismatch,

    #[error("interval length must be non-negative")]
    NegativeLength,

    #[error("distribution has empty support")]
    EmptyDistribution,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no valid (i1, i2) pair: w_(n-i2) - w_(i1) > 0 never holds")]
    NoValidIndices,

    #[error("not a covering pair: {0}")]
    NotCovering(String),

    #[error("malformed permutation context: {0}")]
    InvalidContext(String),

    #[error("instance has {size} elements, above the oracle cap {cap}")]
    OracleCap { size: usize, cap: usize },

    #[error("sample count must be positive")]
    NoSamples,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal an exhausted resource cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::OracleCap { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
