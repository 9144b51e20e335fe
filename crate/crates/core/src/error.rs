use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("jet shape mismatch: ({n_a}, {order_a}) vs ({n_b}, {order_b})")]
    JetShapeMismatch {
        n_a: usize,
        order_a: usize,
        n_b: usize,
        order_b: usize,
    },

    #[error("division by a jet with zero constant term")]
    JetDivisionSingular,

    #[error("index {index} is outside the scale index set [{lo}, {hi}]")]
    IndexNotAdmissible { index: f64, lo: f64, hi: f64 },

    #[error("element representation does not match the scale kind")]
    ElementKindMismatch,

    #[error("element dimension mismatch: expected {expected}, got {got}")]
    ElementDimension { expected: usize, got: usize },

    #[error("smoothing parameter must satisfy theta >= 1, got {0}")]
    ThetaOutOfRange(f64),

    #[error("cube diameter must lie in (0, 1], got {0}")]
    CubeDiameterOutOfRange(f64),

    #[error("matrix size must be >= 1")]
    EmptyMatrix,

    #[error("point belongs to the closed set; query requires a point of the complement")]
    PointOnSet,

    #[error("point too close to the closed set: dist = {dist:.3e} is below 2^-40")]
    TooCloseToSet { dist: f64 },

    #[error("coordinates too large for dyadic enumeration")]
    CoordinateOverflow,

    #[error("closed set must be a non-empty list of pairwise distinct points")]
    InvalidClosedSet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("collection data incomplete: missing entry for point {point}, multi-index {j:?}")]
    IncompleteCollection { point: usize, j: Vec<usize> },

    #[error("multi-index order {order} exceeds the allowed maximum {max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("derivatives of order k+1 are undefined at points of the set")]
    TopOrderOnSet,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("point index {0} out of range")]
    PointIndexOutOfRange(usize),

    #[error("sign-vector enumeration is capped at N = 20, got N = {0}")]
    SignSweepTooLarge(usize),

    #[error("exponent pair must satisfy 0 <= a < b <= 1, got a = {a}, b = {b}")]
    InvalidExponentPair { a: f64, b: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("norm estimation requires rho = k+1, got rho = {rho}, k = {k}")]
    RhoNotTop { rho: f64, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
