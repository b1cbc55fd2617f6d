use std::path::PathBuf;

use crate::regions::RegionId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point {0} is outside the fundamental domain K")]
    Domain(String),

    #[error("orbit reached z = 0 after {step} steps; restart from an irrational seed")]
    OrbitTerminated { step: u64 },

    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: {left} expansion steps vs {right} convergents")]
    LengthMismatch { left: usize, right: usize },

    #[error("digit {0} cannot carry a mark")]
    IllegalMark(String),

    #[error("digit {digit} is not admissible after state {state}")]
    NotAdmissible { state: String, digit: String },

    #[error("pixel index ({i}, {j}) outside 1..={size}")]
    IndexOutOfRange { i: i64, j: i64, size: u32 },

    #[error("point {0} lies outside the square [-1,1]^2")]
    OutOfRange(String),

    #[error("grid is for {actual}, operation requires {expected}")]
    RegionMismatch { expected: RegionId, actual: RegionId },

    #[error("grid resolution mismatch: k={left} vs k={right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("jet reciprocal needs a nonzero constant term")]
    SingularJet,

    #[error("kernel denominator vanishes at w = {a} + {b}i")]
    SingularKernel { a: f64, b: f64 },

    #[error("need at least {needed} distinct resolutions, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("finite-difference stencil ball {index} crosses a region boundary")]
    StencilCrossesBoundary { index: usize },

    #[error("point {0} lies on a region boundary")]
    BoundaryPoint(String),

    #[error("no grid for region {0}")]
    MissingGrid(RegionId),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed grid file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
