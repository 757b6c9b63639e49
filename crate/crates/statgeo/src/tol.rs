//! Shared numerical tolerances.
//!
//! Residuals of exact identities are measured against [`RESIDUAL`];
//! inequalities that are allowed to touch zero use the looser [`SLACK`]
//! floor.  Finite-difference cross-checks get their own budgets because
//! truncation error dominates rounding there.

/// Max absolute residual for identities evaluated through the symbolic
/// derivative path.  Well-conditioned double arithmetic on desk-scale
/// tensors stays orders of magnitude below this.
pub const RESIDUAL: f64 = 1e-8;

/// Slack floor for inequalities: `lhs - rhs >= -SLACK` counts as holding.
pub const SLACK: f64 = 1e-9;

/// Default step for central differences.
pub const FD_STEP: f64 = 1e-5;

/// Relative error budget for first-order finite-difference cross-checks
/// with step [`FD_STEP`].
pub const FD_REL: f64 = 1e-4;

/// Tight bound used where a computation must agree with itself through two
/// exact routes (e.g. dual curvature via coefficients vs. via lowering).
pub const CROSS_CHECK: f64 = 1e-10;

/// Positive-definiteness margin: Cholesky must succeed and the metric times
/// its inverse must reproduce the identity within this bound.
pub const METRIC_INVERSE: f64 = 1e-10;

/// Linear dependence threshold for Gram determinants in frame building.
pub const DEGENERATE_GRAM: f64 = 1e-12;

/// Convergence tolerance for the projected sphere ascent.
pub const ASCENT_TOL: f64 = 1e-10;

/// Root-finding tolerance for polynomial largest roots.
pub const ROOT_TOL: f64 = 1e-13;
