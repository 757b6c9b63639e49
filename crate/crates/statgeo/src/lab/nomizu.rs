//! The commutator-term lower bound.
//!
//! For a trace-free cubic form, the curvature-correction term in the norm
//! Laplacian, `F(X,Y,Z) = −tr_g([K_·, K_X]A)(·,Y,Z)`, pairs against `A`
//! at least as strongly as `(n+1)/(n(n−1))·ψ²` with `ψ = g(A,A)`.  This
//! module evaluates the pairing literally — build `K`, commutators, the
//! derivation action, trace, contract — and reports the gap.

use nalgebra::DMatrix;
use rand::Rng;

use crate::chart::to_dmatrix;
use crate::error::Error;
use crate::tensor::{TensorValue, Variance};
use crate::{tol, Result};

/// `g(F, A) − (n+1)/(n(n−1))·g(A,A)²` for a single pointwise cubic form.
///
/// `a` must be fully symmetric and trace-free with respect to `g`
/// (residuals at most [`tol::CROSS_CHECK`] relative); the computation runs
/// in a `g`-orthonormal frame obtained from the Cholesky factor, so the
/// answer is frame-independent.
pub fn nomizu_gap(a: &TensorValue, g: &TensorValue) -> Result<f64> {
    let n = a.dim();
    if a.rank() != 3 || g.rank() != 2 || g.dim() != n {
        return Err(Error::Precondition {
            message: "the commutator bound needs a (0,3) form and an n x n metric".into(),
        });
    }
    let scale = 1.0 + a.max_abs();
    let mut sym = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = a.get(&[i, j, k]);
                sym = sym.max((v - a.get(&[j, i, k])).abs());
                sym = sym.max((v - a.get(&[i, k, j])).abs());
            }
        }
    }
    if sym > tol::CROSS_CHECK * scale {
        return Err(Error::Precondition {
            message: format!("cubic form is not fully symmetric (residual {sym:e})"),
        });
    }

    let gm = to_dmatrix(g);
    let chol = gm.clone().cholesky().ok_or_else(|| Error::Precondition {
        message: "metric is not positive definite".into(),
    })?;
    let ginv = chol.inverse();
    let mut trace = 0.0f64;
    for x in 0..n {
        let mut t = 0.0;
        for j in 0..n {
            for k in 0..n {
                t += ginv[(j, k)] * a.get(&[x, j, k]);
            }
        }
        trace = trace.max(t.abs());
    }
    if trace > tol::CROSS_CHECK * scale {
        return Err(Error::Precondition {
            message: format!("cubic form is not trace-free (residual {trace:e})"),
        });
    }

    // Orthonormal frame f_t = L⁻ᵀ e_t; transform A into it.
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .expect("triangular factor of a positive definite matrix is invertible");
    let frame = linv.transpose(); // columns are the frame vectors
    let mut at = vec![0.0; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut v = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            v += a.get(&[p, q, r]) * frame[(p, x)] * frame[(q, y)] * frame[(r, z)];
                        }
                    }
                }
                at[idx(x, y, z)] = v;
            }
        }
    }

    // K_t in the frame is just the matrix slice of the transformed form.
    let k_of = |t: usize| DMatrix::from_fn(n, n, |j, k| at[idx(t, j, k)]);
    let ks: Vec<DMatrix<f64>> = (0..n).map(k_of).collect();

    let mut pairing = 0.0;
    let mut psi = 0.0;
    for v in &at {
        psi += v * v;
    }
    for x in 0..n {
        // F(e_x, ·, ·) accumulated over the trace index i.
        let mut f_slice = vec![0.0; n * n];
        for i in 0..n {
            let b = &ks[i] * &ks[x] - &ks[x] * &ks[i];
            for y in 0..n {
                for z in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += b[(m, i)] * at[idx(m, y, z)]
                            + b[(m, y)] * at[idx(i, m, z)]
                            + b[(m, z)] * at[idx(i, y, m)];
                    }
                    f_slice[y * n + z] += v;
                }
            }
        }
        for y in 0..n {
            for z in 0..n {
                pairing += f_slice[y * n + z] * at[idx(x, y, z)];
            }
        }
    }

    let nn = n as f64;
    Ok(pairing - (nn + 1.0) / (nn * (nn - 1.0)) * psi * psi)
}

/// A fully symmetric, trace-free (identity metric) cubic form with
/// canonical entries drawn uniformly from `[-1, 1]` before the trace part
/// is projected out.
pub fn random_trace_free_cubic(n: usize, rng: &mut impl Rng) -> TensorValue {
    let mut a = TensorValue::zeros(n, &[Variance::Down; 3]);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                for p in [
                    [i, j, k],
                    [i, k, j],
                    [j, i, k],
                    [j, k, i],
                    [k, i, j],
                    [k, j, i],
                ] {
                    a.set(&p, v);
                }
            }
        }
    }
    // Project out the trace part: with t_i = Σ_j A_ijj, subtract
    // (t_i δ_jk + t_j δ_ik + t_k δ_ij)/(n+2).
    let mut t = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            t[i] += a.get(&[i, j, j]);
        }
    }
    let s = 1.0 / (n as f64 + 2.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut p = 0.0;
                if j == k {
                    p += t[i];
                }
                if i == k {
                    p += t[j];
                }
                if i == j {
                    p += t[k];
                }
                if p != 0.0 {
                    a.add_to(&[i, j, k], -s * p);
                }
            }
        }
    }
    a
}

/// Identity metric of dimension `n`, as a tensor value.
pub fn identity_metric(n: usize) -> TensorValue {
    let mut g = TensorValue::zeros(n, &[Variance::Down; 2]);
    for i in 0..n {
        g.set(&[i, i], 1.0);
    }
    g
}
