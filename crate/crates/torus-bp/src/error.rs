//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid torus shape d={d}, side={side}: need d >= 1 and side >= 3")]
    InvalidShape { d: usize, side: usize },

    #[error("coordinate component {value} out of range for side {side}")]
    CoordOutOfRange { value: usize, side: usize },

    #[error("configurations live on different shapes")]
    ShapeMismatch,

    #[error("invalid rule for this shape: {reason}")]
    InvalidRule { reason: String },

    #[error("hyper-square dimension set invalid: {reason}")]
    InvalidSquare { reason: String },

    #[error("square dimension r={r} out of range for d={d}")]
    SquareDimOutOfRange { r: usize, d: usize },

    #[error("bounding box in coordinate {dim} is ambiguous under wraparound (diameter >= side/2)")]
    AmbiguousWrap { dim: usize },

    #[error("empty node set rejected: certificate would be vacuous")]
    EmptySet,

    #[error("no cycle detected within {max_rounds} rounds")]
    Truncated { max_rounds: usize },

    #[error("search budget exceeded: {0}")]
    SearchBudget(String),

    #[error("occupation budget of {budget} rounds exhausted")]
    OccupationBudget { budget: usize },

    #[error("tiling requires even side for the scaled process, got side {side}")]
    OddSideTiling { side: usize },

    #[error("event frequency is not monotone in p near p={p}: {detail}")]
    NonMonotoneProfile { p: f64, detail: String },

    #[error("threshold estimation needs a monotone event, got {event}")]
    NonMonotoneEvent { event: String },

    #[error("scaling fit needs at least 3 distinct sizes, got {got}")]
    TooFewPoints { got: usize },

    #[error("witness construction failed on a verified-robust input (bug): {0}")]
    WitnessConstruction(String),

    #[error("config file: {0}")]
    ConfigFormat(#[from] ConfigFormatError),

    #[error("{0}")]
    InvalidArgument(String),
}

/// Decode errors for the on-disk configuration formats, each named distinctly.
#[derive(Debug, Error)]
pub enum ConfigFormatError {
    #[error("bitmap length mismatch: expected {expected} hex digits for {nodes} nodes, got {got}")]
    LengthMismatch {
        expected: usize,
        got: usize,
        nodes: usize,
    },

    #[error("malformed hex at position {pos}: {byte:?}")]
    MalformedHex { pos: usize, byte: char },

    #[error("out-of-range coordinate {value} (side {side}) in node {index}")]
    CoordOutOfRange {
        value: usize,
        side: usize,
        index: usize,
    },

    #[error(
        "coordinate arity mismatch in node {index}: expected {expected} components, got {got}"
    )]
    ArityMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid shape in config file: {0}")]
    BadShape(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
