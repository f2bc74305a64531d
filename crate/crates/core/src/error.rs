use thiserror::Error;

/// Errors raised by time-scale construction, calculus and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{value} is not a point of the time scale")]
    NotInScale { value: f64 },

    #[error("reversed interval: {a} > {b}")]
    ReversedInterval { a: f64, b: f64 },

    #[error("operation not supported for {kind} time scales")]
    UnsupportedKind { kind: &'static str },

    #[error("invalid time scale: {0}")]
    InvalidScale(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("delta derivative along axis {axis} is undefined at the upper edge {value}")]
    AtScaleMax { axis: usize, value: f64 },

    #[error("axis {axis} has fewer than two points in [a, b]")]
    DomainTooSmall { axis: usize },

    #[error("point {point:?} lies outside the octant range on axis {axis}")]
    OutOfOctantRange { axis: usize, point: [f64; 3] },

    #[error("point {point:?} lies outside [sigma(base), b] on axis {axis}")]
    OutOfRange { axis: usize, point: [f64; 3] },

    #[error("function value at grid index {index:?} is not finite")]
    NonFinite { index: [usize; 3] },

    #[error("tabulated function has {got} values, box scales need {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("axis {axis} is not a unit-step integer scale {{1, ..., n}}")]
    NotUnitIntegerScale { axis: usize },

    #[error("bad interval: {0}")]
    BadInterval(String),

    #[error("unknown function family `{0}`")]
    UnknownFamily(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
