use thiserror::Error;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("function `{name}` takes 1 argument, got {got} (offset {offset})")]
    Arity {
        name: String,
        got: usize,
        offset: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("adaptive quadrature did not converge on [{a}, {b}] within depth {depth}")]
    QuadratureNoConvergence { a: f64, b: f64, depth: u32 },

    #[error("quaternion is not of unit norm (norm = {norm})")]
    NotUnit { norm: f64 },

    #[error("atan2 of (0, 0) is undefined")]
    BothZero,

    #[error("theta2 = {theta2} is at or beyond the singular value ±pi/4")]
    SingularTheta2 { theta2: f64 },

    #[error("Picard iterate left the box of radius {radius} at t = {t}")]
    EscapedBox { t: f64, radius: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("segment starting at t = {t} advanced less than the minimum step")]
    StalledSegment { t: f64 },

    #[error("integration blew up at t = {t}")]
    Blowup { t: f64 },

    #[error("coefficients are not commutative (max deviation {max_deviation:e})")]
    NotCommutative { max_deviation: f64 },

    #[error("no special-case closed form matches the coefficients")]
    NoSpecialCase,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
