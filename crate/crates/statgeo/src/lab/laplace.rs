//! Laplacian comparisons for the cubic-form norm.
//!
//! Builds `ψ = g(A,A)` as a closed-form expression (adjugate over
//! determinant, no symbolic inversion), then checks two facts about it:
//! the rough-Laplacian product rule `Δψ = 2g(ΔA,A) + 2‖∇̂A‖²`, which holds
//! for any structure, and the curvature comparison
//! `Δψ ≥ 2(n+1)·H₃·ψ + 2(n+1)/(n(n−1))·ψ²`, which needs conjugate
//! symmetry, apolarity, and a nonpositive sampled sectional floor.

use crate::chart::StatStructure;
use crate::connection::{
    cubic_derivative_at, cubic_laplacian_at, laplacian_scalar_at, structure_residuals,
};
use crate::curvature::conjugate_symmetry_report;
use crate::error::Error;
use crate::expr::Expr;
use crate::lab::pinch::CurvaturePinch;
use crate::tensor::TensorValue;
use crate::{tol, Result};

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if *c == 0.0)
}

/// Determinant by first-row Laplace expansion.  `m` is a square grid of
/// expressions; the smart constructors collapse the many zero products a
/// sparse metric produces.
fn det_expr(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Expr::constant(0.0);
    for col in 0..n {
        if is_zero(&m[0][col]) {
            continue;
        }
        let minor: Vec<Vec<Expr>> = (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&c| c != col)
                    .map(|c| m[r][c].clone())
                    .collect()
            })
            .collect();
        let term = Expr::mul(m[0][col].clone(), det_expr(&minor));
        acc = if col % 2 == 0 {
            Expr::add(acc, term)
        } else {
            Expr::sub(acc, term)
        };
    }
    acc
}

/// `ψ = g(A,A) = A_{ijk} A_{lmn} g^{il} g^{jm} g^{kn}` as one scalar
/// expression over the chart.
///
/// The inverse metric enters through the adjugate, so the result is the
/// ratio of two polynomial-like expressions in the structure's component
/// fields: `ψ = (Σ A·A·adj·adj·adj) / det(g)³`.  Intended for desk-scale
/// structures — the term count grows with the number of nonzero cubic
/// components and the chart dimension.
pub fn cubic_norm_expression(s: &StatStructure) -> Result<Expr> {
    let n = s.dim();
    let g: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| s.metric_entry(i, j).clone()).collect())
        .collect();
    let det = det_expr(&g);

    // adj_{ij} = (−1)^{i+j} · det(g with row j and column i removed).
    let mut adj = vec![vec![Expr::constant(0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            if n == 1 {
                adj[i][j] = Expr::constant(1.0);
                continue;
            }
            let minor: Vec<Vec<Expr>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| g[r][c].clone())
                        .collect()
                })
                .collect();
            let d = det_expr(&minor);
            adj[i][j] = if (i + j) % 2 == 0 { d } else { Expr::neg(d) };
        }
    }

    // Only index triples with a symbolically nonzero component contribute.
    let mut live = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !is_zero(s.cubic_entry(i, j, k)) {
                    live.push((i, j, k));
                }
            }
        }
    }

    let mut numerator = Expr::constant(0.0);
    for &(i, j, k) in &live {
        for &(l, m, nn) in &live {
            let term = Expr::mul(
                Expr::mul(s.cubic_entry(i, j, k).clone(), s.cubic_entry(l, m, nn).clone()),
                Expr::mul(
                    adj[i][l].clone(),
                    Expr::mul(adj[j][m].clone(), adj[k][nn].clone()),
                ),
            );
            numerator = Expr::add(numerator, term);
        }
    }

    let det_cubed = Expr::mul(det.clone(), Expr::mul(det.clone(), det));
    Ok(Expr::div(numerator, det_cubed))
}

/// `Σ x_{ijk} y_{lmn} g^{il} g^{jm} g^{kn}` for two rank-3 values.
fn pair3(x: &TensorValue, y: &TensorValue, ginv: &TensorValue) -> f64 {
    let n = x.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let xv = x.get(&[i, j, k]);
                if xv == 0.0 {
                    continue;
                }
                for l in 0..n {
                    for m in 0..n {
                        for nn in 0..n {
                            acc += xv
                                * y.get(&[l, m, nn])
                                * ginv.get(&[i, l])
                                * ginv.get(&[j, m])
                                * ginv.get(&[k, nn]);
                        }
                    }
                }
            }
        }
    }
    acc
}

/// `‖t‖²_g` for a rank-4 all-lower value (used on `∇̂A`).
fn norm4_sq(t: &TensorValue, ginv: &TensorValue) -> f64 {
    let n = t.dim();
    let mut acc = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let tv = t.get(&[a, b, c, d]);
                    if tv == 0.0 {
                        continue;
                    }
                    for p in 0..n {
                        for q in 0..n {
                            for r in 0..n {
                                for s in 0..n {
                                    acc += tv
                                        * t.get(&[p, q, r, s])
                                        * ginv.get(&[a, p])
                                        * ginv.get(&[b, q])
                                        * ginv.get(&[c, r])
                                        * ginv.get(&[d, s]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    acc
}

/// Both sides of the product rule `Δ(g(A,A)) = 2g(ΔA,A) + 2‖∇̂A‖²` at one
/// point, evaluated by independent routes: the left through the symbolic
/// norm expression and the scalar Laplace–Beltrami operator, the right
/// through the tensorial rough Laplacian and covariant derivative.
#[derive(Debug, Clone, Copy)]
pub struct SimonsCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / (1 + max(|lhs|, |rhs|))`.
    pub relative_gap: f64,
}

pub fn simons_check(s: &StatStructure, p: &[f64]) -> Result<SimonsCheck> {
    let psi = cubic_norm_expression(s)?;
    let lhs = laplacian_scalar_at(s, &psi, p)?;

    let (_, ginv) = s.metric_at(p)?;
    let a = s.cubic_at(p)?;
    let lap = cubic_laplacian_at(s, p)?;
    let nabla = cubic_derivative_at(s, p)?;
    let rhs = 2.0 * pair3(&lap, &a, &ginv) + 2.0 * norm4_sq(&nabla, &ginv);

    let relative_gap = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
    Ok(SimonsCheck {
        lhs,
        rhs,
        relative_gap,
    })
}

/// One point of the norm-Laplacian comparison.
#[derive(Debug, Clone, Copy)]
pub struct DeltaPsiCheck {
    /// `Δψ` at the point.
    pub lhs: f64,
    /// `2(n+1)·H₃·ψ + 2(n+1)/(n(n−1))·ψ²`.
    pub rhs: f64,
    /// `lhs − rhs`; nonnegative when the comparison holds.
    pub slack: f64,
    pub psi: f64,
    pub h3: f64,
}

/// Evaluate the comparison `Δψ ≥ 2(n+1)H₃ψ + 2(n+1)/(n(n−1))ψ²` at `p`.
///
/// Preconditions: the structure must be conjugate symmetric and trace-free
/// at `p` (all residuals at most [`tol::RESIDUAL`]), the pinch must match
/// the chart dimension, and its sectional floor `H₃` must be nonpositive —
/// the comparison is only stated for nonpositively pinched structures.
/// The pinch normally comes from sampling the structure's own sectional
/// curvatures.
pub fn delta_psi_check(
    s: &StatStructure,
    p: &[f64],
    pinch: &CurvaturePinch,
) -> Result<DeltaPsiCheck> {
    let n = s.dim();
    if pinch.n() != n {
        return Err(Error::Precondition {
            message: format!(
                "pinch is for dimension {} but the structure has dimension {n}",
                pinch.n()
            ),
        });
    }
    if pinch.h3() > 0.0 {
        return Err(Error::Precondition {
            message: format!(
                "the comparison needs a nonpositive sectional floor, got H3 = {}",
                pinch.h3()
            ),
        });
    }
    let cs = conjugate_symmetry_report(s, p)?;
    let worst = cs
        .curvature_gap
        .max(cs.derivative_asymmetry)
        .max(cs.skew_defect);
    if worst > tol::RESIDUAL {
        return Err(Error::Precondition {
            message: format!("structure is not conjugate symmetric at the point (residual {worst:e})"),
        });
    }
    let resid = structure_residuals(s, p)?;
    if resid.trace_free > tol::RESIDUAL {
        return Err(Error::Precondition {
            message: format!(
                "cubic form is not trace-free at the point (residual {:e})",
                resid.trace_free
            ),
        });
    }

    let psi_expr = cubic_norm_expression(s)?;
    let lhs = laplacian_scalar_at(s, &psi_expr, p)?;
    let psi = s.cubic_norm_sq_at(p)?;
    let h3 = pinch.h3();
    let nf = n as f64;
    let rhs = 2.0 * (nf + 1.0) * h3 * psi + 2.0 * (nf + 1.0) / (nf * (nf - 1.0)) * psi * psi;
    Ok(DeltaPsiCheck {
        lhs,
        rhs,
        slack: lhs - rhs,
        psi,
        h3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, StructureBuilder};
    use crate::gallery::{self, FixtureSpec};
    use crate::lab::pinch::empirical_pinch;

    fn curved_structure() -> StatStructure {
        let chart = Chart::new(vec![(-0.5, 0.5); 2], vec![5, 5]).unwrap();
        StructureBuilder::new(chart)
            .metric(
                0,
                0,
                Expr::add(
                    Expr::constant(1.0),
                    Expr::mul(Expr::coord(0), Expr::coord(0)),
                ),
            )
            .unwrap()
            .metric(
                1,
                1,
                Expr::add(
                    Expr::constant(1.0),
                    Expr::mul(Expr::coord(1), Expr::coord(1)),
                ),
            )
            .unwrap()
            .metric(
                0,
                1,
                Expr::mul(
                    Expr::constant(0.3),
                    Expr::mul(Expr::coord(0), Expr::coord(1)),
                ),
            )
            .unwrap()
            .cubic(0, 0, 0, Expr::constant(1.0))
            .unwrap()
            .cubic(0, 0, 1, Expr::constant(0.5))
            .unwrap()
            .cubic(0, 1, 1, Expr::constant(-0.3))
            .unwrap()
            .cubic(1, 1, 1, Expr::constant(0.7))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn norm_expression_matches_the_pointwise_norm() {
        let s = gallery::build(&FixtureSpec::new("constant_distinct", 3)).unwrap();
        let psi = cubic_norm_expression(&s).unwrap();
        for p in [[0.0, 0.0, 0.0], [0.3, -0.2, 0.4]] {
            let direct = s.cubic_norm_sq_at(&p).unwrap();
            let via_expr = psi.eval(&p).unwrap();
            assert!((direct - via_expr).abs() <= 1e-12, "{direct} vs {via_expr}");
        }
    }

    #[test]
    fn norm_expression_handles_a_curved_non_diagonal_metric() {
        let s = curved_structure();
        let psi = cubic_norm_expression(&s).unwrap();
        for p in [[0.2, -0.3], [-0.4, 0.1], [0.0, 0.0]] {
            let direct = s.cubic_norm_sq_at(&p).unwrap();
            let via_expr = psi.eval(&p).unwrap();
            assert!(
                (direct - via_expr).abs() <= 1e-12 * (1.0 + direct.abs()),
                "{direct} vs {via_expr}"
            );
        }
    }

    #[test]
    fn constant_structures_have_constant_norm() {
        let s = gallery::build(&FixtureSpec::new("constant_distinct", 3)).unwrap();
        let check = simons_check(&s, &[0.1, 0.0, -0.2]).unwrap();
        assert!(check.lhs.abs() <= 1e-10);
        assert!(check.rhs.abs() <= 1e-10);
        assert!(check.relative_gap <= 1e-10);
    }

    #[test]
    fn product_rule_holds_on_the_linear_family() {
        let s = gallery::build(&FixtureSpec::new("linear_distinct", 4)).unwrap();
        let points = [
            [1.3, 1.5, 1.7, 1.1],
            [1.5, 1.5, 1.5, 1.5],
            [1.2, 1.8, 1.4, 1.6],
            [1.9, 1.1, 1.5, 1.3],
            [1.4, 1.4, 1.9, 1.2],
        ];
        for p in points {
            let check = simons_check(&s, &p).unwrap();
            // Both routes land on the same hand-computable value: with the
            // flat metric, Δψ = 2‖∂A‖² = 48 for this family.
            assert!((check.lhs - 48.0).abs() <= 1e-8, "lhs {}", check.lhs);
            assert!((check.rhs - 48.0).abs() <= 1e-8, "rhs {}", check.rhs);
            assert!(check.relative_gap <= 1e-10);
        }
    }

    #[test]
    fn product_rule_holds_on_a_curved_structure() {
        let s = curved_structure();
        for p in [[0.2, -0.3], [-0.1, 0.25]] {
            let check = simons_check(&s, &p).unwrap();
            assert!(
                check.relative_gap <= 1e-9,
                "gap {} at {p:?}",
                check.relative_gap
            );
        }
    }

    #[test]
    fn comparison_is_saturated_by_the_constant_family() {
        let s = gallery::build(&FixtureSpec::new("constant_distinct", 4)).unwrap();
        let (pinch, _) = empirical_pinch(&s, 400, 9).unwrap();
        assert!(pinch.h3() <= -2.0 + 1e-9, "sampled floor {}", pinch.h3());
        let check = delta_psi_check(&s, &[0.0; 4], &pinch).unwrap();
        assert!((check.psi - 24.0).abs() <= 1e-9);
        assert!(check.lhs.abs() <= 1e-9);
        assert!(check.slack >= -1e-9, "slack {}", check.slack);
    }

    #[test]
    fn comparison_preconditions_are_enforced() {
        // Not conjugate symmetric: the perturbed family at a generic point.
        let s = gallery::perturbed_structure(3, 5).unwrap();
        let pinch = CurvaturePinch::theorem(3, -1.0, 0.0).unwrap();
        let p = [0.1, 0.17, 0.24];
        assert!(delta_psi_check(&s, &p, &pinch).is_err());

        // Positive sectional floor.
        let good = gallery::build(&FixtureSpec::new("constant_distinct", 4)).unwrap();
        let bad_pinch = CurvaturePinch::from_bounds(4, 1.0, 1.0).unwrap();
        assert!(delta_psi_check(&good, &[0.0; 4], &bad_pinch).is_err());

        // Dimension mismatch.
        let wrong_dim = CurvaturePinch::theorem(3, -1.0, 0.0).unwrap();
        assert!(delta_psi_check(&good, &[0.0; 4], &wrong_dim).is_err());
    }
}
