use thiserror::Error;

/// Errors produced by the geometry, map and curve routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points are coincident, cannot define a line")]
    DegenerateLine,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("lines {0} and {1} are parallel")]
    ParallelLines(String, String),
    #[error("projection angle {0} is outside (0, pi/2]")]
    InvalidAngle(f64),
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("invalid rule sequence: {0}")]
    InvalidRules(String),
    #[error("unknown line label {0:?}")]
    UnknownLabel(String),
    #[error("point ({0}, {1}) does not lie on any line of the arrangement")]
    PointOffArrangement(f64, f64),
    #[error("induced map is neutral (scale {0}), no isolated fixed point")]
    NeutralCycle(f64),
    #[error("map is collapsing and cannot be inverted")]
    NotInvertible,
    #[error("orientation repair exhausted after {0} configurations")]
    RepairExhausted(usize),
    #[error("invalid curve spec: {0}")]
    InvalidSpec(String),
    #[error("orbit hit an invariant point at step {0}")]
    DegenerateHit(usize),
    #[error("no period k*n with k <= {0} detected")]
    NotConverged(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
