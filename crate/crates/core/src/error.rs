//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("frame index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("timestamp {next} is not after previous {prev}")]
    NonMonotoneTimestamp { prev: f64, next: f64 },
    #[error("stamped series requires a timestamp on push")]
    MissingTimestamp,
    #[error("series is empty")]
    EmptySeries,
    #[error("invalid window: t0 {t0} > t1 {t1}")]
    InvalidWindow { t0: f64, t1: f64 },
    #[error("frame rate must be positive, got {0}")]
    BadFrameRate(f64),
    #[error("ring capacity must be at least 1")]
    BadCapacity,
    #[error("operation requires a fixed-rate time model")]
    NotFixedRate,
    #[error("too few frames: need {needed}, got {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node index {index} out of range ({count} nodes)")]
    NodeOutOfRange { index: usize, count: usize },
    #[error("quaternion norm {norm} too far from unit")]
    NonUnitQuaternion { norm: f64 },
    #[error("invalid axis order `{0}`")]
    InvalidAxisOrder(String),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("segment mass fractions sum to {sum}, expected 1")]
    BadMassFractions { sum: f64 },
    #[error("segment ratio {0} outside [0, 1]")]
    BadSegmentRatio(f64),
    #[error("empty candidate list")]
    NoCandidates,
    #[error("empty knot table")]
    EmptyKnots,
    #[error("knot angles must be strictly increasing")]
    UnsortedKnots,
    #[error("joint `{0}` missing from discomfort table")]
    UnknownJoint(String),
    #[error("discomfort table is empty")]
    EmptyTable,
    #[error("weights: expected {expected} entries, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("weights sum to {sum}, expected 1")]
    BadWeights { sum: f64 },
    #[error("invalid analysis grid: {0}")]
    InvalidGrid(String),
    #[error("lag range [{lag_min}, {lag_max}] invalid for {rows} rows with {neighbors} neighbors")]
    InvalidLagRange {
        lag_min: usize,
        lag_max: usize,
        rows: usize,
        neighbors: usize,
    },
    #[error("window must span at least {needed} frame(s)")]
    BadEffortWindow { needed: usize },
    #[error("frame {frame} precedes impulse lag {lag}")]
    FrameBeforeLag { frame: usize, lag: usize },
    #[error("template column {column} has no unmasked rows")]
    MaskedColumn { column: usize },
    #[error("feature counts differ: {a} vs {b}")]
    FeatureCountMismatch { a: usize, b: usize },
    #[error("no executions provided")]
    NoExecutions,
    #[error("frame counts differ across series: {a} vs {b}")]
    FrameCountMismatch { a: usize, b: usize },
    #[error("time models differ across series")]
    TimeModelMismatch,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("label end {end} precedes start {start}")]
    LabelOrder { start: f64, end: f64 },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("{0}")]
    Config(String),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
