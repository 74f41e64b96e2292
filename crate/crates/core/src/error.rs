use thiserror::Error;

/// Failure to parse an expression or a field specification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{func}` at byte {offset} takes {expected} argument(s), got {found}")]
    Arity {
        func: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("field must have exactly three comma-separated components, got {0}")]
    ComponentCount(usize),
}

/// Pointwise evaluation failure of an expression or field.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of a nonpositive number")]
    LogDomain,
    #[error("square root of a negative number")]
    SqrtDomain,
    #[error("power with negative base and non-integer exponent")]
    PowDomain,
    #[error("non-finite value or derivative")]
    NonFinite,
    #[error("cannot normalize a vanishing field")]
    ZeroVector,
}

/// Errors raised by the geometric analyses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(
        "expected rank {expected} of dV, found rank {found} (singular values {singular_values:?})"
    )]
    RankMismatch {
        expected: usize,
        found: usize,
        singular_values: [f64; 3],
    },
    #[error("kernel direction is numerically ambiguous: {0}")]
    KernelAmbiguity(String),
    #[error("projected curve collapses (chord length {0:e})")]
    ProjectionCollapse(f64),
    #[error("field leaves the normal-form plane near the frame origin (deviation {0:e})")]
    PlaneValidation(f64),
    #[error("out-of-plane component {r:e} at z = {z}")]
    OutOfPlane { z: f64, r: f64 },
    #[error("theta' vanishes or changes sign near z = {z} (contact condition fails)")]
    ThetaPrimeVanishes { z: f64 },
    #[error("theta unwrapping still aliased after refining the grid")]
    ThetaAliasing,
    #[error("y = {0} lies outside the sampled theta window")]
    OutsideWindow(f64),
}
