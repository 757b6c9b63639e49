//! Root-bound arithmetic for the sup estimates.
//!
//! The differential inequality `Δψ ≥ b₀ψ² − b₁ψ` (coefficients as below)
//! caps a nonnegative ψ by the largest root of the right-hand side; the
//! closed forms here are cross-checked against the generic root finder.

use crate::error::Error;
use crate::Result;

/// Largest real root of `b₀ψᵏ − b₁ψᵏ⁻¹ − … − b_k` for `b₀ > 0`,
/// `b₁…b_k ≥ 0`, `k > 1`.
///
/// That sign pattern gives the coefficient sequence at most one sign
/// change, hence at most one positive root; the polynomial is `≤ 0` at the
/// origin and grows without bound, and the Cauchy bound confines every
/// root to `[0, 1 + max(bᵢ/b₀)]`.  Bisection on that bracket plus a short
/// Newton polish reaches machine precision.
pub fn largest_root(b: &[f64]) -> Result<f64> {
    if b.len() < 3 {
        return Err(Error::Precondition {
            message: "the root bound needs degree k > 1 (at least three coefficients)".into(),
        });
    }
    if b.iter().any(|v| !v.is_finite()) || !(b[0] > 0.0) || b[1..].iter().any(|v| *v < 0.0) {
        return Err(Error::Precondition {
            message: "coefficients must satisfy b0 > 0 and b1…bk >= 0".into(),
        });
    }
    if b[1..].iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let k = b.len() - 1;
    let p = |x: f64| -> f64 {
        let mut acc = b[0];
        for c in &b[1..] {
            acc = acc * x - c;
        }
        acc
    };
    let dp = |x: f64| -> f64 {
        let mut acc = b[0] * k as f64;
        for (offset, c) in b[1..k].iter().enumerate() {
            let deg = (k - 1 - offset) as f64;
            acc = acc * x - c * deg;
        }
        acc
    };

    let mut hi = 1.0 + b[1..].iter().fold(0.0f64, |m, c| m.max(c / b[0]));
    while p(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..128 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = dp(root);
        if d.abs() < f64::MIN_POSITIVE {
            break;
        }
        let next = root - p(root) / d;
        if next.is_finite() && next >= lo && next <= hi {
            root = next;
        }
    }
    Ok(root)
}

/// Coefficients of the norm inequality's right-hand side,
/// `(2(n+1)/(n(n−1)))·ψ² + 2(n+1)H₃·ψ`, in [`largest_root`] layout.
pub fn norm_root_instance(n: usize, h3: f64) -> [f64; 3] {
    let nn = n as f64;
    [2.0 * (nn + 1.0) / (nn * (nn - 1.0)), -2.0 * (nn + 1.0) * h3, 0.0]
}

/// Closed-form sup bound for the squared cubic norm: `ψ ≤ −n(n−1)H₃`.
///
/// Must agree with [`largest_root`] on [`norm_root_instance`]; the tests
/// hold the two routes together.
pub fn psi_sup_bound(n: usize, h3: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition {
            message: "the norm bound needs n >= 2".into(),
        });
    }
    if h3 > 0.0 {
        return Err(Error::Precondition {
            message: format!("the norm bound needs H3 <= 0, got {h3}"),
        });
    }
    Ok(-((n * (n - 1)) as f64) * h3)
}

/// Sup bound for the diagonal cubic values when the sectional values of
/// the primal connection are bounded below by `N ≤ 0`:
/// `A(U,U,U) ≤ √(−(n+1)N)` on unit vectors.  `N = 0` forces a trivial
/// structure.
pub fn cubic_sup_bound(n: usize, big_n: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition {
            message: "the diagonal bound needs n >= 2".into(),
        });
    }
    if big_n > 0.0 {
        return Err(Error::Precondition {
            message: format!("the diagonal bound needs N <= 0, got {big_n}"),
        });
    }
    Ok((-(n as f64 + 1.0) * big_n).sqrt())
}
