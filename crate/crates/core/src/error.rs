use thiserror::Error;

/// Errors raised by the numerical and mesh-handling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// An argument is structurally invalid (out of range, wrong variant, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An integrand produced a NaN or infinite value.
    #[error("non-finite integrand value at node {node} (x = {x:?})")]
    NonFinite { node: usize, x: Vec<f64> },

    /// Mesh text could not be parsed.
    #[error("mesh parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Two consecutive mesh nodes coincide.
    #[error("degenerate segment {segment}: nodes {a} and {b} coincide")]
    DegenerateSegment { segment: usize, a: usize, b: usize },

    /// Two non-adjacent segments of the boundary cross or touch.
    #[error("mesh is not simple: segments {0} and {1} intersect")]
    SelfIntersection(usize, usize),

    /// A matrix or report file could not be decoded.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}
