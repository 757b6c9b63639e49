//! Independent cross-check routes for derived quantities.
//!
//! Every function in this module recomputes something the production
//! pipeline also produces, but by a deliberately different path:
//! connection coefficients from finite differences of metric *values*
//! (never the symbolic derivative caches), curvature from finite
//! differences of those coefficients, the spectral pairing from a raw
//! `O(n⁴)` contraction over a model curvature tensor, and sphere maxima
//! from dense grids.  Tests pit the production code against these routes;
//! nothing here may call into the code it is meant to check.

use crate::chart::{fd_partial, orthonormalize, Field, StatStructure};
use crate::connection::ConnectionCoeffs;
use crate::curvature::Plane;
use crate::error::Error;
use crate::tensor::{TensorValue, Variance};
use crate::Result;

/// Levi-Civita coefficients at `p` with all metric derivatives taken by
/// Richardson-extrapolated central differences of step `h`.
///
/// The only symbolic operation involved is *evaluation* of the metric
/// component expressions; the stored `∂g` caches are never touched.
pub fn christoffel_fd(s: &StatStructure, p: &[f64], h: f64) -> Result<ConnectionCoeffs> {
    let n = s.dim();
    let (_, ginv) = s.metric_at(p)?;
    let mut dg = Vec::with_capacity(n);
    for k in 0..n {
        dg.push(fd_partial(s, Field::Metric, p, k, h, true)?);
    }
    let mut out = ConnectionCoeffs::zeros(n);
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut v = 0.0;
                for m in 0..n {
                    v += ginv.get(&[l, m])
                        * (dg[i].get(&[m, j]) + dg[j].get(&[m, i]) - dg[m].get(&[i, j]));
                }
                let v = 0.5 * v;
                out.set(l, i, j, v);
                if i != j {
                    out.set(l, j, i, v);
                }
            }
        }
    }
    Ok(out)
}

/// Levi-Civita curvature `R[l][i][j][k]` by finite differences only.
///
/// The coefficient field comes from [`christoffel_fd`] with inner step
/// `h_inner`; its directional derivatives are Richardson-extrapolated
/// central differences with outer step `h_outer`.  Both stencils must fit
/// inside the chart box.  Truncation error is `O(h_outer⁴)` on analytic
/// metrics, so `h_outer = 1e-2` comfortably beats the `1e-5` oracle
/// tolerance used by the curvature acceptance checks.
pub fn curvature_fd(
    s: &StatStructure,
    p: &[f64],
    h_outer: f64,
    h_inner: f64,
) -> Result<TensorValue> {
    let n = s.dim();
    let gamma = christoffel_fd(s, p, h_inner)?;

    // dgamma[k][l][i][j] = ∂_k Γ^l_{ij}
    let mut dgamma = vec![0.0; n * n * n * n];
    let idx = |k: usize, l: usize, i: usize, j: usize| ((k * n + l) * n + i) * n + j;
    for k in 0..n {
        let central = |step: f64| -> Result<(ConnectionCoeffs, ConnectionCoeffs)> {
            let mut fwd = p.to_vec();
            let mut bwd = p.to_vec();
            fwd[k] += step;
            bwd[k] -= step;
            Ok((
                christoffel_fd(s, &fwd, h_inner)?,
                christoffel_fd(s, &bwd, h_inner)?,
            ))
        };
        let (fw, bw) = central(h_outer)?;
        let (fw2, bw2) = central(0.5 * h_outer)?;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let coarse = (fw.get(l, i, j) - bw.get(l, i, j)) / (2.0 * h_outer);
                    let fine = (fw2.get(l, i, j) - bw2.get(l, i, j)) / h_outer;
                    dgamma[idx(k, l, i, j)] = (4.0 * fine - coarse) / 3.0;
                }
            }
        }
    }

    let mut r = TensorValue::zeros(n, &[Variance::Up, Variance::Down, Variance::Down, Variance::Down]);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = dgamma[idx(i, l, j, k)] - dgamma[idx(j, l, i, k)];
                    for m in 0..n {
                        v += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    r.set(&[l, i, j, k], v);
                }
            }
        }
    }
    Ok(r)
}

/// Metric sectional curvature of `plane` at `p`, entirely by finite
/// differences (see [`curvature_fd`] for the error budget).
pub fn sectional_fd(
    s: &StatStructure,
    p: &[f64],
    plane: &Plane,
    h_outer: f64,
    h_inner: f64,
) -> Result<f64> {
    let n = s.dim();
    let r = curvature_fd(s, p, h_outer, h_inner)?;
    let (g, _) = s.metric_at(p)?;
    let frame = orthonormalize(s, p, &[plane.u.clone(), plane.v.clone()])?;
    let (e1, e2) = (&frame[0], &frame[1]);
    // g(R(e1, e2) e2, e1), contracted longhand on purpose.
    let mut sec = 0.0;
    for l in 0..n {
        let mut w = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    w += r.get(&[l, i, j, k]) * e1[i] * e2[j] * e2[k];
                }
            }
        }
        for m in 0..n {
            sec += w * g.get(&[l, m]) * e1[m];
        }
    }
    Ok(sec)
}

/// Raw evaluation of the spectral pairing `⟨T′_V, A_V⟩` from the (0,4)
/// definition of `T_V`, with no algebraic simplification.
///
/// `T_V(X,Y,Z,W) = −⟨K_V X, R(Y,Z)W⟩ − 2⟨K_V W, R(Y,Z)X⟩`, traced over the
/// middle slots and paired against `A_V`.  The derivation of the closed
/// form shows the pairing sees the curvature only through the sectional
/// values of coordinate planes, so a model tensor
/// `R[i][j][c][d] = k[i][j]·(δ_{id}δ_{jc} − δ_{ic}δ_{jd})`
/// realises any prescribed sectional table `k` with all the symmetries the
/// closed form assumes.  `lambda` are the eigenvalues of `K_V` in an
/// orthonormal eigenframe; `k` is the full symmetric sectional matrix with
/// zero diagonal.
pub fn pairing_contraction(lambda: &[f64], k: &[Vec<f64>]) -> f64 {
    let n = lambda.len();
    assert_eq!(k.len(), n, "sectional matrix must be n x n");
    let rdown = |i: usize, j: usize, c: usize, d: usize| -> f64 {
        let plus = (i == d && j == c) as i64 as f64;
        let minus = (i == c && j == d) as i64 as f64;
        k[i][j] * (plus - minus)
    };
    // T_V on basis vectors (x, y, z, w).
    let t = |x: usize, y: usize, z: usize, w: usize| -> f64 {
        -lambda[x] * rdown(y, z, w, x) - 2.0 * lambda[w] * rdown(y, z, x, w)
    };
    let mut acc = 0.0;
    for x in 0..n {
        let mut trace = 0.0;
        for i in 0..n {
            trace += t(x, i, x, i);
        }
        acc += lambda[x] * trace;
    }
    acc
}

/// Dense-grid maximization of `U ↦ A(U,U,U)` over the Euclidean unit
/// sphere, with staged window refinement.  Returns `(value, direction)`.
///
/// This is the desk-scale oracle the projected-ascent maximizer is judged
/// against; it only supports `n ∈ {2, 3}` (a dense grid in higher
/// dimension buys nothing the rotation-invariance property tests do not
/// already cover).  Final angular spacing after three refinements is
/// `~(window/resolution)·(4/resolution)³`, far below the comparison
/// tolerances in use.
pub fn max_cubic_grid(a: &TensorValue, resolution: usize) -> Result<(f64, Vec<f64>)> {
    if resolution < 8 {
        return Err(Error::Precondition {
            message: "grid resolution must be at least 8".into(),
        });
    }
    match a.dim() {
        2 => Ok(circle_max(a, resolution)),
        3 => Ok(sphere_max(a, resolution)),
        d => Err(Error::Precondition {
            message: format!("dense sphere grid supports n = 2 or 3, got n = {d}"),
        }),
    }
}

fn cubic_value(a: &TensorValue, u: &[f64]) -> f64 {
    let n = u.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                acc += a.get(&[i, j, k]) * u[i] * u[j] * u[k];
            }
        }
    }
    acc
}

fn circle_max(a: &TensorValue, resolution: usize) -> (f64, Vec<f64>) {
    let mut lo = 0.0;
    let mut hi = std::f64::consts::TAU;
    let mut best = f64::NEG_INFINITY;
    let mut best_t = 0.0;
    for _ in 0..4 {
        let step = (hi - lo) / resolution as f64;
        for sidx in 0..=resolution {
            let t = lo + sidx as f64 * step;
            let v = cubic_value(a, &[t.cos(), t.sin()]);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        lo = best_t - 2.0 * step;
        hi = best_t + 2.0 * step;
    }
    (best, vec![best_t.cos(), best_t.sin()])
}

fn sphere_max(a: &TensorValue, resolution: usize) -> (f64, Vec<f64>) {
    let dir = |theta: f64, phi: f64| -> [f64; 3] {
        [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ]
    };
    let mut t_lo = 0.0;
    let mut t_hi = std::f64::consts::PI;
    let mut p_lo = 0.0;
    let mut p_hi = std::f64::consts::TAU;
    let mut best = f64::NEG_INFINITY;
    let (mut best_t, mut best_p) = (0.0, 0.0);
    for stage in 0..4 {
        let t_res = resolution;
        let p_res = if stage == 0 { 2 * resolution } else { resolution };
        let t_step = (t_hi - t_lo) / t_res as f64;
        let p_step = (p_hi - p_lo) / p_res as f64;
        for ti in 0..=t_res {
            let theta = t_lo + ti as f64 * t_step;
            for pi in 0..=p_res {
                let phi = p_lo + pi as f64 * p_step;
                let v = cubic_value(a, &dir(theta, phi));
                if v > best {
                    best = v;
                    best_t = theta;
                    best_p = phi;
                }
            }
        }
        t_lo = best_t - 2.0 * t_step;
        t_hi = best_t + 2.0 * t_step;
        p_lo = best_p - 2.0 * p_step;
        p_hi = best_p + 2.0 * p_step;
    }
    (best, dir(best_t, best_p).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{Chart, StructureBuilder};
    use crate::connection::christoffel_at;
    use crate::curvature::curvature_bundle_at;
    use crate::expr::parse;

    fn poincare() -> StatStructure {
        let chart = Chart::new(vec![(-1.0, 1.0), (0.5, 3.0)], vec![5, 5]).unwrap();
        StructureBuilder::new(chart)
            .metric(0, 0, parse("1 / x2^2", 2).unwrap())
            .unwrap()
            .metric(1, 1, parse("1 / x2^2", 2).unwrap())
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn fd_christoffels_match_symbolic_route() {
        let s = poincare();
        let p = [0.2, 1.3];
        let sym = christoffel_at(&s, &p).unwrap();
        let fd = christoffel_fd(&s, &p, 1e-4).unwrap();
        let n = s.dim();
        let mut worst = 0.0f64;
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((sym.get(l, i, j) - fd.get(l, i, j)).abs());
                }
            }
        }
        assert!(worst < 1e-9, "max coefficient gap {worst}");
    }

    #[test]
    fn fd_sectional_reproduces_hyperbolic_curvature() {
        let s = poincare();
        let k = sectional_fd(&s, &[0.1, 1.7], &Plane::coordinate(0, 1, 2), 1e-2, 1e-3).unwrap();
        assert!((k + 1.0).abs() < 1e-6, "fd sectional {k}");
    }

    #[test]
    fn fd_curvature_matches_symbolic_on_a_full_metric() {
        // Non-diagonal, position-dependent metric; positive definite on the box.
        let chart = Chart::new(vec![(-0.5, 0.5), (-0.5, 0.5)], vec![3, 3]).unwrap();
        let s = StructureBuilder::new(chart)
            .metric(0, 0, parse("1 + x1^2", 2).unwrap())
            .unwrap()
            .metric(1, 1, parse("1 + x2^2", 2).unwrap())
            .unwrap()
            .metric(0, 1, parse("0.3 * x1 * x2", 2).unwrap())
            .unwrap()
            .build()
            .unwrap();
        let p = [0.1, -0.2];
        let sym = curvature_bundle_at(&s, &p).unwrap().r_metric;
        let fd = curvature_fd(&s, &p, 1e-2, 1e-3).unwrap();
        let gap = sym.max_abs_diff(&fd);
        assert!(gap < 1e-6, "curvature route gap {gap}");
    }

    #[test]
    fn pairing_model_case_matches_hand_value() {
        // n = 2, λ = (1, −1), k₁₂ = −1: the pairing collapses to
        // 6·λ₁²·k₁₂ = −6.
        let k = vec![vec![0.0, -1.0], vec![-1.0, 0.0]];
        let v = pairing_contraction(&[1.0, -1.0], &k);
        assert!((v + 6.0).abs() < 1e-14, "got {v}");
    }

    #[test]
    fn pairing_vanishes_with_zero_spectrum() {
        let k = vec![vec![0.0, 0.7], vec![0.7, 0.0]];
        assert_eq!(pairing_contraction(&[0.0, 0.0], &k), 0.0);
    }

    #[test]
    fn circle_grid_finds_axis_maximum() {
        let mut a = TensorValue::zeros(2, &[Variance::Down; 3]);
        a.set(&[0, 0, 0], 2.0);
        let (v, dir) = max_cubic_grid(&a, 200).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "value {v}");
        assert!((dir[0].abs() - 1.0).abs() < 1e-5 && dir[1].abs() < 1e-4);
    }

    #[test]
    fn sphere_grid_finds_symmetric_maximum() {
        // All-distinct-triple cubic with unit coefficient: the maximum of
        // 6·u1u2u3 on the unit sphere is 2/√3 at (1,1,1)/√3.
        let mut a = TensorValue::zeros(3, &[Variance::Down; 3]);
        for perm in [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ] {
            a.set(&perm, 1.0);
        }
        let (v, dir) = max_cubic_grid(&a, 160).unwrap();
        let expect = 2.0 / 3.0f64.sqrt();
        assert!((v - expect).abs() < 1e-9, "value {v} vs {expect}");
        let m = 1.0 / 3.0f64.sqrt();
        for c in &dir {
            assert!((c.abs() - m).abs() < 1e-4, "direction {dir:?}");
        }
    }

    #[test]
    fn grid_rejects_unsupported_dimension() {
        let a = TensorValue::zeros(4, &[Variance::Down; 3]);
        assert!(max_cubic_grid(&a, 64).is_err());
    }
}
