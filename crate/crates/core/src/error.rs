use thiserror::Error;

/// Errors raised by the verification toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quadratic form is degenerate (eigenvalue {eigenvalue:e}, tolerance {tolerance:e})")]
    NonDegeneracyViolation { eigenvalue: f64, tolerance: f64 },

    #[error("form matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("form index {index} is not strictly between 0 and {dim}")]
    InvalidIndex { index: usize, dim: usize },

    #[error("subspace is degenerate for the quadratic form")]
    DegenerateSubspace,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("iteration did not converge (last gap {gap:e})")]
    NoConvergence { gap: f64 },

    #[error("flow direction is not in the positive cone (J(X) = {value:e})")]
    FlowDirectionNotPositive { value: f64 },

    #[error("vector field vanishes at the requested point")]
    SingularPoint,

    #[error("trajectory left the region at t = {time}")]
    EscapedRegion { time: f64, state: Vec<f64> },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("separation fails on the orbit at grid index {index} (t = {time})")]
    SeparationFailedOnOrbit { index: usize, time: f64, point: Vec<f64> },

    #[error("negative vector left the negative cone at t = {time}")]
    NegativeVectorEscapedCone { time: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("operator is not J-separated")]
    NotJSeparated,

    #[error("L L^+ has a non-positive or complex eigenvalue")]
    NonPositiveSpectrum,

    #[error("{what} = {value} out of range {lo}..={hi}")]
    OutOfRange { what: &'static str, value: usize, lo: usize, hi: usize },

    #[error("bundles are nearly parallel (angle {angle:e})")]
    IllConditionedSplitting { angle: f64 },

    #[error("sample {index} is a singularity of the field")]
    SingularityInRegion { index: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
