//! Numerical laboratory for statistical structures `(g, ∇)` whose cubic form
//! is trace-free and whose primal/dual curvatures agree.
//!
//! Everything runs on a coordinate chart: metric and cubic-form components
//! are arithmetic expressions in the chart coordinates ([`expr`]), evaluated
//! pointwise into dense tensors ([`tensor`]).  From those the crate derives
//! the Levi-Civita connection, the statistical pair `∇ = ∇̂ + K` and its
//! dual, all four curvature tensors, and the residuals of the structural
//! identities that tie them together ([`connection`], [`curvature`]).
//!
//! The [`lab`] module checks the quantitative side: spectrum pairing bounds,
//! the algebraic gap of Nomizu–Smyth type, Laplacian comparisons for the
//! squared cubic norm, curvature pinch windows, and maximizer diagnostics
//! for the cubic form on the unit sphere.  [`gallery`] carries the built-in
//! example structures, and [`report`]/[`specfile`] handle the JSON surface
//! used by the `statgeo` command-line tool.
//!
//! Derivatives are exact: component expressions are differentiated
//! symbolically, never numerically.  Finite differences appear only in
//! [`chart::fd_partial`] and the [`oracle`] module, which exist to
//! cross-check the symbolic path and are kept independent of it.

pub mod chart;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod gallery;
pub mod lab;
pub mod oracle;
pub mod report;
pub mod specfile;
pub mod tensor;
pub mod tol;

pub use chart::{Chart, StatStructure};
pub use error::Error;
pub use expr::Expr;
pub use tensor::TensorValue;

/// Convenient result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
