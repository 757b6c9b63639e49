//! Extremal directions of the cubic form.
//!
//! `max_cubic_direction` maximises `A(u,u,u)` over the `g`-unit sphere at a
//! point by projected gradient ascent with random restarts, and
//! `maximizer_checks` audits a candidate direction: the eigenvector
//! property of `K_V`, the spectral gaps `λ₁ − 2λ_i`, and the two
//! contraction identities that the Laplacian-comparison argument rests on.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chart::{to_dmatrix, StatStructure};
use crate::curvature::{curvature_bundle_at, lower_curvature};
use crate::error::Error;
use crate::lab::standard_normal;
use crate::tensor::TensorValue;
use crate::{tol, Result};

/// Result of the sphere ascent.
#[derive(Debug, Clone)]
pub struct MaxDirection {
    /// `g`-unit maximising direction, in chart coordinates.
    pub v: Vec<f64>,
    /// `A(v,v,v)` at the returned direction.
    pub value: f64,
    /// Whether the winning restart hit the gradient tolerance.
    pub converged: bool,
}

const MAX_ITERS: usize = 500;
const INITIAL_STEP: f64 = 0.1;

fn cubic_value(a: &TensorValue, u: &DVector<f64>) -> f64 {
    let n = u.len();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                v += a.get(&[i, j, k]) * u[i] * u[j] * u[k];
            }
        }
    }
    v
}

/// Lexicographic comparison used to break exact value ties between
/// restarts, so the returned direction is deterministic.
fn lex_smaller(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `w`
/// (Euclidean inner product): Gram–Schmidt on the identity columns, with
/// the most `w`-aligned axis dropped.
fn tangent_basis(w: &DVector<f64>) -> DMatrix<f64> {
    let n = w.len();
    let mut drop = 0;
    for i in 1..n {
        if w[i].abs() > w[drop].abs() {
            drop = i;
        }
    }
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        if i == drop {
            continue;
        }
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v -= w * w[i];
        for c in &cols {
            let d = c.dot(&v);
            v -= c * d;
        }
        let nv = v.norm();
        v /= nv;
        cols.push(v);
    }
    DMatrix::from_columns(&cols)
}

/// Maximise `u ↦ A(u,u,u)` over `{u : g(u,u) = 1}` at `p`.
///
/// Projected gradient ascent on the sphere: the Euclidean gradient
/// `3·A(·,u,u)` is raised with `g⁻¹`, projected onto the tangent space,
/// and the iterate is retracted by `g`-normalisation.  The step starts at
/// 0.1 and only ever halves (on a non-increase); a restart converges when
/// the tangent gradient norm drops below [`tol::ASCENT_TOL`].  Restarts
/// draw their initial directions from a seeded generator, so the result
/// is reproducible; ties between restarts go to the larger value and then
/// to the lexicographically smaller direction.
pub fn max_cubic_direction(
    s: &StatStructure,
    p: &[f64],
    restarts: usize,
    seed: u64,
) -> Result<MaxDirection> {
    if restarts == 0 {
        return Err(Error::Precondition {
            message: "at least one restart is required".into(),
        });
    }
    let n = s.dim();
    let (g, ginv) = s.metric_at(p)?;
    let a = s.cubic_at(p)?;
    let gm = to_dmatrix(&g);
    let ginv_m = to_dmatrix(&ginv);

    let g_norm = |u: &DVector<f64>| (u.dot(&(&gm * u))).sqrt();

    // Cholesky frame for the second-order polish: with G = LLᵀ, frame
    // coordinates w = Lᵀu make the g-sphere the Euclidean one and the
    // shape operator the symmetric matrix L⁻¹ M(u) L⁻ᵀ.
    let chol = gm.clone().cholesky().ok_or_else(|| Error::Precondition {
        message: "metric is not positive definite".into(),
    })?;
    let l = chol.l();
    let lt = l.transpose();
    let linv = l
        .clone()
        .try_inverse()
        .expect("triangular factor of a positive definite matrix is invertible");
    let linv_t = linv.transpose();
    let shape_in_frame = |w: &DVector<f64>| -> DMatrix<f64> {
        let u = &linv_t * w;
        let m = DMatrix::from_fn(n, n, |j, k| {
            let mut acc = 0.0;
            for i in 0..n {
                acc += u[i] * a.get(&[i, j, k]);
            }
            acc
        });
        &linv * m * &linv_t
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<MaxDirection> = None;

    for _ in 0..restarts {
        let mut u = loop {
            let cand = DVector::from_fn(n, |_, _| standard_normal(&mut rng));
            if g_norm(&cand) > 1e-6 {
                break cand;
            }
        };
        u /= g_norm(&u);
        let mut f = cubic_value(&a, &u);
        if f < 0.0 {
            u = -u;
            f = -f;
        }

        let mut step = INITIAL_STEP;
        for _ in 0..MAX_ITERS {
            // Euclidean gradient of the cubic, then raise and project.
            let eg = DVector::from_fn(n, |m, _| {
                let mut v = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        v += a.get(&[m, j, k]) * u[j] * u[k];
                    }
                }
                3.0 * v
            });
            let rg = &ginv_m * &eg;
            // g(rg, u) = eg · u because g · g⁻¹ cancels.
            let tangent = &rg - &u * eg.dot(&u);
            if g_norm(&tangent) <= tol::ASCENT_TOL {
                break;
            }
            let trial = &u + &tangent * step;
            let trial = &trial / g_norm(&trial);
            let ft = cubic_value(&a, &trial);
            if ft > f {
                u = trial;
                f = ft;
            } else {
                step *= 0.5;
                if step < 1e-18 {
                    break;
                }
            }
        }

        // Second-order polish.  Value-comparison ascent stalls once the
        // improvement per step falls below representable differences in f
        // (criticality about the square root of machine epsilon), so
        // finish with Newton on the criticality equation K_u u = f·u,
        // whose quadratic convergence reaches machine precision.  On the
        // Euclidean unit sphere in frame coordinates the Hessian of the
        // cubic is P(6S)P − 3f·I on the tangent space.
        let mut w = &lt * &u;
        let wn = w.norm();
        if wn > 0.0 {
            w /= wn;
        }
        let mut sm = shape_in_frame(&w);
        let mut fw = w.dot(&(&sm * &w));
        let mut grad = (&sm * &w - &w * fw) * 3.0;
        let mut gn = grad.norm();
        for _ in 0..6 {
            if gn <= 1e-15 * (1.0 + fw.abs()) {
                break;
            }
            let basis = tangent_basis(&w);
            let hred = basis.transpose()
                * (&sm * 6.0 - DMatrix::identity(n, n) * (3.0 * fw))
                * &basis;
            let gred = basis.transpose() * &grad;
            let Some(newton) = hred.lu().solve(&(-&gred)) else {
                break;
            };
            let mut accepted = false;
            let mut scale = 1.0;
            for _ in 0..4 {
                let cand = (&w + &basis * (&newton * scale)).normalize();
                let smc = shape_in_frame(&cand);
                let fc = cand.dot(&(&smc * &cand));
                let gc = (&smc * &cand - &cand * fc) * 3.0;
                if gc.norm() < gn {
                    w = cand;
                    sm = smc;
                    fw = fc;
                    grad = gc;
                    gn = grad.norm();
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        u = &linv_t * &w;
        u /= g_norm(&u);
        f = cubic_value(&a, &u);
        if f < 0.0 {
            u = -u;
            f = -f;
        }
        let converged = gn <= tol::ASCENT_TOL;

        let better = match &best {
            None => true,
            Some(b) => {
                let tie = 1e-12 * (1.0 + b.value.abs().max(f.abs()));
                f > b.value + tie
                    || ((f - b.value).abs() <= tie
                        && lex_smaller(&u, &DVector::from_vec(b.v.clone())))
            }
        };
        if better {
            best = Some(MaxDirection {
                v: u.iter().copied().collect(),
                value: f,
                converged,
            });
        }
    }

    Ok(best.expect("restarts >= 1 always yields a candidate"))
}

/// Audit data for a candidate extremal direction.
#[derive(Debug, Clone)]
pub struct MaximizerChecks {
    /// `‖K_V v − A(v,v,v)·v‖_g` — how far `v` is from an eigenvector of
    /// its own shape operator.
    pub eigvec_residual: f64,
    /// Spectrum of `K_V`, with the eigenvalue whose eigenvector matches
    /// `v` listed first and the rest sorted descending.
    pub lambda: Vec<f64>,
    /// `λ₁ − 2λ_i` for each of the remaining eigenvalues; at a maximiser
    /// these are nonnegative.
    pub lambda_gaps: Vec<f64>,
    /// Absolute defect of the commutator-derivation identity
    /// `−Σ_i ([K_{e_i}, K_V]A)(e_i,V,V) = Σ_i λ_i²(3λ₁ − 2λ_i)`.
    pub identity_k_residual: f64,
    /// Absolute defect of the curvature-derivation identity
    /// `Σ_i (R(e_i,V)A)(e_i,V,V) = Σ_{i>1} (λ₁ − 2λ_i)·g(R(e_i,V)V,e_i)`.
    pub identity_r_residual: f64,
}

/// Evaluate both extremal-direction identities at `p` for the `g`-unit
/// vector `v`.
///
/// The commutator identity needs only trace-freeness of `A`; the
/// curvature identity additionally needs conjugate symmetry (skewness of
/// the lowered curvature in its last index pair).  Both are evaluated in
/// the `g`-orthonormal eigenframe of `K_V`, so their residuals measure
/// the algebra at eigensolver precision rather than ascent accuracy.
pub fn maximizer_checks(s: &StatStructure, p: &[f64], v: &[f64]) -> Result<MaximizerChecks> {
    let n = s.dim();
    if v.len() != n {
        return Err(Error::Precondition {
            message: format!("direction has {} entries, chart dimension is {n}", v.len()),
        });
    }
    let (g, ginv) = s.metric_at(p)?;
    let a = s.cubic_at(p)?;
    let gm = to_dmatrix(&g);
    let ginv_m = to_dmatrix(&ginv);
    let vv = DVector::from_column_slice(v);

    let unit_defect = (vv.dot(&(&gm * &vv)) - 1.0).abs();
    if unit_defect > tol::RESIDUAL {
        return Err(Error::Precondition {
            message: format!("direction is not g-unit (|g(v,v) - 1| = {unit_defect:e})"),
        });
    }

    // Shape operator of v: (K_V)^j_k = g^{jm} Σ_i v^i A_{imk}.
    let m = DMatrix::from_fn(n, n, |j, k| {
        let mut acc = 0.0;
        for i in 0..n {
            acc += vv[i] * a.get(&[i, j, k]);
        }
        acc
    });
    let kv = &ginv_m * &m;
    let fv = cubic_value(&a, &vv);
    let resid_vec = &kv * &vv - &vv * fv;
    let eigvec_residual = resid_vec.dot(&(&gm * &resid_vec)).max(0.0).sqrt();

    // Diagonalise K_V in a g-orthonormal frame: with G = LLᵀ the matrix
    // S = L⁻¹ M L⁻ᵀ is symmetric and similar to K_V.
    let chol = gm.clone().cholesky().ok_or_else(|| Error::Precondition {
        message: "metric is not positive definite".into(),
    })?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .expect("triangular factor of a positive definite matrix is invertible");
    let sym = &linv * &m * linv.transpose();
    let eig = nalgebra::SymmetricEigen::new(sym);

    // v in frame coordinates, then in the eigenbasis; the eigenvector
    // with the largest overlap plays the role of V.
    let w = l.transpose() * &vv;
    let c = eig.eigenvectors.transpose() * &w;
    let mut star = 0;
    for t in 1..n {
        if c[t].abs() > c[star].abs() {
            star = t;
        }
    }

    // Order: the V-eigenpair first, the rest by descending eigenvalue
    // (ties by original index), each with a deterministic sign.
    let mut rest: Vec<usize> = (0..n).filter(|&t| t != star).collect();
    rest.sort_by(|&x, &y| {
        eig.eigenvalues[y]
            .partial_cmp(&eig.eigenvalues[x])
            .expect("eigenvalues of a symmetric matrix are finite")
            .then(x.cmp(&y))
    });
    let order: Vec<usize> = std::iter::once(star).chain(rest).collect();

    let mut lambda = Vec::with_capacity(n);
    let mut frame = DMatrix::zeros(n, n);
    for (slot, &t) in order.iter().enumerate() {
        lambda.push(eig.eigenvalues[t]);
        let mut col = eig.eigenvectors.column(t).clone_owned();
        let sign = if slot == 0 {
            if c[star] < 0.0 {
                -1.0
            } else {
                1.0
            }
        } else {
            let lead = col.iter().find(|x| x.abs() > 1e-12);
            match lead {
                Some(x) if *x < 0.0 => -1.0,
                _ => 1.0,
            }
        };
        col *= sign;
        frame.set_column(slot, &col);
    }
    // Back to chart coordinates: columns become g-orthonormal eigenvectors.
    let e = linv.transpose() * frame;

    let lambda_gaps: Vec<f64> = (1..n).map(|i| lambda[0] - 2.0 * lambda[i]).collect();

    // Transform A into the eigenframe.
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut at = vec![0.0; n * n * n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mut acc = 0.0;
                for pp in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            acc += a.get(&[pp, q, r]) * e[(pp, x)] * e[(q, y)] * e[(r, z)];
                        }
                    }
                }
                at[idx(x, y, z)] = acc;
            }
        }
    }

    // Commutator identity.  In the frame, K_{e_i} has matrix Ã_{i··} and
    // every commutator acts on Ã as a derivation.
    let k_of = |t: usize| DMatrix::from_fn(n, n, |j, k| at[idx(t, j, k)]);
    let kv_frame = k_of(0);
    let mut lhs_k = 0.0;
    for i in 0..n {
        let b = k_of(i) * &kv_frame - &kv_frame * k_of(i);
        for mm in 0..n {
            lhs_k += b[(mm, i)] * at[idx(mm, 0, 0)]
                + b[(mm, 0)] * (at[idx(i, mm, 0)] + at[idx(i, 0, mm)]);
        }
    }
    let rhs_k: f64 = lambda
        .iter()
        .map(|&li| li * li * (3.0 * lambda[0] - 2.0 * li))
        .sum();
    let identity_k_residual = (lhs_k - rhs_k).abs();

    // Curvature identity.  Lower the primal curvature, move it into the
    // frame, and contract both sides.
    let bundle = curvature_bundle_at(s, p)?;
    let rlow = lower_curvature(&bundle.r, &g);
    let mut rt = vec![0.0; n * n * n * n];
    let ridx = |a_: usize, b_: usize, c_: usize, d_: usize| ((a_ * n + b_) * n + c_) * n + d_;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for u in 0..n {
                    let mut acc = 0.0;
                    for pp in 0..n {
                        for q in 0..n {
                            for r in 0..n {
                                for ss in 0..n {
                                    acc += rlow.get(&[pp, q, r, ss])
                                        * e[(pp, x)]
                                        * e[(q, y)]
                                        * e[(r, z)]
                                        * e[(ss, u)];
                                }
                            }
                        }
                    }
                    rt[ridx(x, y, z, u)] = acc;
                }
            }
        }
    }

    let mut lhs_r = 0.0;
    for i in 0..n {
        let mut term = 0.0;
        for d in 0..n {
            term += rt[ridx(i, 0, i, d)] * at[idx(d, 0, 0)]
                + rt[ridx(i, 0, 0, d)] * (at[idx(i, d, 0)] + at[idx(i, 0, d)]);
        }
        lhs_r -= term;
    }
    let mut rhs_r = 0.0;
    for i in 1..n {
        rhs_r += (lambda[0] - 2.0 * lambda[i]) * rt[ridx(i, 0, 0, i)];
    }
    let identity_r_residual = (lhs_r - rhs_r).abs();

    Ok(MaximizerChecks {
        eigvec_residual,
        lambda,
        lambda_gaps,
        identity_k_residual,
        identity_r_residual,
    })
}
