//! Crate-wide error type.
//!
//! Every fallible operation funnels into [`Error`].  Variants are grouped:
//! expression-language errors carry byte offsets into the source text,
//! geometric errors carry enough context to identify the offending point or
//! input, and spec-file errors carry the JSON path that failed validation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // ---- expression language ----
    /// Malformed source text; `offset` is a byte index into the input.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// Identifier is neither a coordinate nor a known function.
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    /// Coordinate index outside `x1..=xn` for the chart dimension `n`.
    #[error("coordinate x{index} out of range for dimension {dim}")]
    CoordOutOfRange { index: usize, dim: usize },

    /// Evaluation hit a pole, a branch cut, or overflowed to a non-finite
    /// value.
    #[error("domain error: {message}")]
    Domain { message: String },

    // ---- charts and structures ----
    /// Chart constructor rejected its bounds or grid counts.
    #[error("invalid chart: {message}")]
    InvalidChart { message: String },

    /// Point lies outside the chart box (or too close to its boundary for a
    /// finite-difference stencil).
    #[error("point outside chart domain: {message}")]
    OutsideDomain { message: String },

    /// Metric failed the positive-definiteness check at a point.
    #[error("metric not positive definite at {point:?} (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eig: f64 },

    /// Input vectors were linearly dependent where a frame was required.
    #[error("degenerate input: {message}")]
    DegenerateInput { message: String },

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {message}")]
    Precondition { message: String },

    // ---- spec files ----
    /// Structure spec file failed validation (bad key, duplicate component,
    /// missing field, unknown fixture, ...).
    #[error("invalid structure spec: {message}")]
    InvalidSpec { message: String },

    /// Underlying JSON was unreadable.
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Shorthand used by the evaluator.
    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain {
            message: message.into(),
        }
    }

    pub(crate) fn spec(message: impl Into<String>) -> Self {
        Error::InvalidSpec {
            message: message.into(),
        }
    }
}
