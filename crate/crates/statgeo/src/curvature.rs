//! Curvature of the connection triple.
//!
//! Each curvature tensor is computed the same way — straight from its own
//! connection's coefficients and their coordinate derivatives,
//! `R^l_{ijk} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk}
//!  - Γ^l_{jm} Γ^m_{ik}` with `R(∂_i, ∂_j) ∂_k = R^l_{ijk} ∂_l` — so the
//! structural relations between `R`, `R*`, `R̂`, and `K` stay falsifiable
//! residuals rather than definitions.  The one deliberate redundancy is the
//! dual tensor, which is also derived from `R` through the lowered duality
//! relation `g(R(X,Y)Z, W) = -g(R*(X,Y)W, Z)` to produce a cross-check
//! residual carried on the bundle.
//!
//! Layout: `(1,3)` tensors store the output index first (`[l][i][j][k]`);
//! lowered tensors store arguments in call order (`[i][j][k][l]` for
//! `g(R(∂_i,∂_j)∂_k, ∂_l)`).

use crate::chart::{orthonormalize, StatStructure};
use crate::connection::PointData;
use crate::error::Error;
use crate::tensor::{Symmetry, TensorValue, Variance};
use crate::Result;
use std::collections::BTreeMap;

/// Tangent plane spanned by two coordinate-component vectors (need not be
/// orthonormal; sectional curvature orthonormalizes internally).
#[derive(Debug, Clone)]
pub struct Plane {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Plane {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Plane {
        Plane { u, v }
    }

    /// The coordinate plane `span(∂_i, ∂_j)` (zero-based).
    pub fn coordinate(i: usize, j: usize, n: usize) -> Plane {
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        u[i] = 1.0;
        v[j] = 1.0;
        Plane { u, v }
    }
}

/// All curvature data of the structure at one point.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    /// Curvature of the primal connection `∇`, `[l][i][j][k]`.
    pub r: TensorValue,
    /// Curvature of the dual connection `∇*`.
    pub r_dual: TensorValue,
    /// Curvature of the Levi-Civita connection `∇̂`.
    pub r_metric: TensorValue,
    /// `(R + R*) / 2` — the tensor whose sectional traces the pinch
    /// machinery consumes.
    pub r_mean: TensorValue,
    /// Ricci tensors `Ric(Y,Z) = tr(X ↦ R(X,Y)Z)`, layout `[j][k]`.
    pub ric: TensorValue,
    pub ric_dual: TensorValue,
    pub ric_metric: TensorValue,
    pub scalar: f64,
    pub scalar_dual: f64,
    pub scalar_metric: f64,
    /// Max component difference between `R*` computed from the dual
    /// coefficients and `R*` recovered from `R` by the lowered duality
    /// relation.  Should sit at rounding level for any valid structure.
    pub dual_consistency: f64,
}

/// Residuals of the three equivalent formulations of conjugate symmetry.
#[derive(Debug, Clone, Copy)]
pub struct ConjugateSymmetryReport {
    /// `max |R - R*|` over all components.
    pub curvature_gap: f64,
    /// Max asymmetry of `∇̂A` in (derivative, first argument) slots.
    pub derivative_asymmetry: f64,
    /// Max of `|g(R(X,Y)Z, W) + g(R(X,Y)W, Z)|` — failure of the lowered
    /// tensor to be skew in its last pair.
    pub skew_defect: f64,
}

impl ConjugateSymmetryReport {
    /// `Some(true)` if all three residuals call the structure conjugate
    /// symmetric at tolerance `tol`, `Some(false)` if all three reject it,
    /// `None` if the formulations disagree (which would falsify their
    /// equivalence).
    pub fn verdict(&self, tol: f64) -> Option<bool> {
        let votes = [
            self.curvature_gap <= tol,
            self.derivative_asymmetry <= tol,
            self.skew_defect <= tol,
        ];
        if votes.iter().all(|&v| v == votes[0]) {
            Some(votes[0])
        } else {
            None
        }
    }
}

/// Residuals of the curvature identities tying the triple together.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// `max |R + R* - 2R̂ - 2[K,K]|`.
    pub pair_sum: f64,
    /// `max |Ric + Ric* - 2R̂ic + 2 tr(K_· K_·)|`.
    pub ricci_sum: f64,
    /// `|ρ̂ - ρ - ‖A‖²_g|`.
    pub scalar_norm: f64,
    /// Min eigenvalue of the symmetrized `R̂ic - Ric`; nonnegative (up to
    /// rounding) whenever the structure is conjugate symmetric.
    pub ricci_dominance_gap: f64,
}

/// Off-diagonal curvature components in a `g`-orthonormal frame; any of
/// them being nonzero witnesses that the structure is not projectively
/// flat.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    /// Key `"i,j,l"` (one-based, `i < j`, `l ∉ {i,j}`) mapping to
    /// `g(R(f_i, f_j) f_j, f_l)`.
    pub components: BTreeMap<String, f64>,
    pub max_abs: f64,
}

// ---------------------------------------------------------------------------
// assembly
// ---------------------------------------------------------------------------

/// `R^l_{ijk}` from one connection's coefficients and their coordinate
/// partials (`dgamma[k][l][i][j] = ∂_k Γ^l_{ij}`).
fn curvature_from_coeffs(
    n: usize,
    gamma: &crate::connection::ConnectionCoeffs,
    dgamma: &TensorValue,
) -> TensorValue {
    let mut r = TensorValue::zeros(
        n,
        &[Variance::Up, Variance::Down, Variance::Down, Variance::Down],
    )
    .with_symmetry(Symmetry::Antisymmetric(1, 2));
    for l in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let mut v =
                        dgamma.get(&[i, l, j, k]) - dgamma.get(&[j, l, i, k]);
                    for m in 0..n {
                        v += gamma.get(l, i, m) * gamma.get(m, j, k)
                            - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    r.set(&[l, i, j, k], v);
                    r.set(&[l, j, i, k], -v);
                }
            }
        }
    }
    r
}

fn ricci_of(n: usize, r: &TensorValue) -> TensorValue {
    let mut ric = TensorValue::zeros(n, &[Variance::Down, Variance::Down]);
    for j in 0..n {
        for k in 0..n {
            let mut v = 0.0;
            for i in 0..n {
                v += r.get(&[i, i, j, k]);
            }
            ric.set(&[j, k], v);
        }
    }
    ric
}

fn scalar_of(n: usize, ric: &TensorValue, ginv: &TensorValue) -> f64 {
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            s += ginv.get(&[j, k]) * ric.get(&[j, k]);
        }
    }
    s
}

/// Lower the output index: `out[i][j][k][l] = g(R(∂_i,∂_j)∂_k, ∂_l)`.
pub(crate) fn lower_curvature(r: &TensorValue, g: &TensorValue) -> TensorValue {
    let n = r.dim();
    let mut low = TensorValue::zeros(n, &[Variance::Down; 4])
        .with_symmetry(Symmetry::Antisymmetric(0, 1));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += r.get(&[m, i, j, k]) * g.get(&[m, l]);
                    }
                    low.set(&[i, j, k, l], v);
                }
            }
        }
    }
    low
}

pub(crate) fn bundle_from_data(data: &PointData) -> CurvatureBundle {
    let n = data.n;

    // ∂_k K^l_{ij} = ∂_k (g^{lm} A_{ijm}), product rule over cached partials.
    let mut dk = TensorValue::zeros(
        n,
        &[Variance::Down, Variance::Up, Variance::Down, Variance::Down],
    );
    for kk in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        v += data.dginv.get(&[kk, l, m]) * data.a.get(&[i, j, m])
                            + data.ginv.get(&[l, m]) * data.da.get(&[kk, i, j, m]);
                    }
                    dk.set(&[kk, l, i, j], v);
                    dk.set(&[kk, l, j, i], v);
                }
            }
        }
    }

    let mut gamma_primal = data.gamma.clone();
    let mut gamma_dual = data.gamma.clone();
    let mut dgamma_primal = data.dgamma.clone();
    let mut dgamma_dual = data.dgamma.clone();
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let kv = data.k.get(&[l, i, j]);
                gamma_primal.set(l, i, j, gamma_primal.get(l, i, j) + kv);
                gamma_dual.set(l, i, j, gamma_dual.get(l, i, j) - kv);
                for kk in 0..n {
                    let dkv = dk.get(&[kk, l, i, j]);
                    dgamma_primal.set(&[kk, l, i, j], dgamma_primal.get(&[kk, l, i, j]) + dkv);
                    dgamma_dual.set(&[kk, l, i, j], dgamma_dual.get(&[kk, l, i, j]) - dkv);
                }
            }
        }
    }

    let r = curvature_from_coeffs(n, &gamma_primal, &dgamma_primal);
    let r_dual = curvature_from_coeffs(n, &gamma_dual, &dgamma_dual);
    let r_metric = curvature_from_coeffs(n, &data.gamma, &data.dgamma);

    let mut r_mean = r.clone();
    for (m, d) in r_mean.as_mut_slice().iter_mut().zip(r_dual.as_slice()) {
        *m = 0.5 * (*m + d);
    }

    // Cross-check the dual tensor against the duality relation
    // g(R*(X,Y)Z, W) = -g(R(X,Y)W, Z).
    let low = lower_curvature(&r, &data.g);
    let low_dual = lower_curvature(&r_dual, &data.g);
    let mut dual_consistency = 0.0_f64;
    for idx in low_dual.indices() {
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let expected = -low.get(&[i, j, l, k]);
        dual_consistency = dual_consistency.max((low_dual.get(&idx) - expected).abs());
    }

    let ric = ricci_of(n, &r);
    let ric_dual = ricci_of(n, &r_dual);
    let ric_metric = ricci_of(n, &r_metric);
    let scalar = scalar_of(n, &ric, &data.ginv);
    let scalar_dual = scalar_of(n, &ric_dual, &data.ginv);
    let scalar_metric = scalar_of(n, &ric_metric, &data.ginv);

    CurvatureBundle {
        r,
        r_dual,
        r_metric,
        r_mean,
        ric,
        ric_dual,
        ric_metric,
        scalar,
        scalar_dual,
        scalar_metric,
        dual_consistency,
    }
}

/// All curvature tensors of the structure at `p`.
pub fn curvature_bundle_at(s: &StatStructure, p: &[f64]) -> Result<CurvatureBundle> {
    Ok(bundle_from_data(&PointData::at(s, p)?))
}

/// Sectional curvature of `(R + R*)/2` on the given plane:
/// `k(π) = g(𝓡(e1, e2) e2, e1)` for a `g`-orthonormal basis of `π`.
///
/// The plane's spanning vectors are orthonormalized internally, and the
/// value is independent of which orthonormal basis results.
pub fn sectional_curvature_at(s: &StatStructure, p: &[f64], plane: &Plane) -> Result<f64> {
    let bundle = curvature_bundle_at(s, p)?;
    let (g, _) = s.metric_at(p)?;
    sectional_from_parts(&bundle.r_mean, &g, s, p, plane)
}

/// Sectional value from an already-computed curvature tensor (any of the
/// bundle's `(1,3)` tensors) — avoids recomputing the bundle in sweeps.
pub fn sectional_from_parts(
    r_mean: &TensorValue,
    g: &TensorValue,
    s: &StatStructure,
    p: &[f64],
    plane: &Plane,
) -> Result<f64> {
    let n = s.dim();
    let frame = orthonormalize(s, p, &[plane.u.clone(), plane.v.clone()])?;
    let (e1, e2) = (&frame[0], &frame[1]);
    // w = 𝓡(e1, e2) e2
    let mut w = vec![0.0; n];
    for l in 0..n {
        let mut v = 0.0;
        for i in 0..n {
            if e1[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    v += r_mean.get(&[l, i, j, k]) * e1[i] * e2[j] * e2[k];
                }
            }
        }
        w[l] = v;
    }
    let mut sec = 0.0;
    for l in 0..n {
        for m in 0..n {
            sec += w[l] * g.get(&[l, m]) * e1[m];
        }
    }
    Ok(sec)
}

/// The three equivalent residuals of conjugate symmetry at `p`.
pub fn conjugate_symmetry_report(s: &StatStructure, p: &[f64]) -> Result<ConjugateSymmetryReport> {
    let data = PointData::at(s, p)?;
    let bundle = bundle_from_data(&data);
    let n = data.n;

    let curvature_gap = bundle.r.max_abs_diff(&bundle.r_dual);

    let mut derivative_asymmetry = 0.0_f64;
    for l in 0..n {
        for i in (l + 1)..n {
            for j in 0..n {
                for k in 0..n {
                    let d = data.nabla_a.get(&[l, i, j, k]) - data.nabla_a.get(&[i, l, j, k]);
                    derivative_asymmetry = derivative_asymmetry.max(d.abs());
                }
            }
        }
    }

    let low = lower_curvature(&bundle.r, &data.g);
    let mut skew_defect = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in k..n {
                    let v = low.get(&[i, j, k, l]) + low.get(&[i, j, l, k]);
                    skew_defect = skew_defect.max(v.abs());
                }
            }
        }
    }

    Ok(ConjugateSymmetryReport {
        curvature_gap,
        derivative_asymmetry,
        skew_defect,
    })
}

/// Residuals of the pair-sum, Ricci-sum, and scalar/norm identities, plus
/// the Ricci dominance gap.
///
/// The Ricci-sum and scalar/norm identities are the apolar forms: they are
/// exact only when `A` is trace-free (`structure_residuals` reports that),
/// which is the standing assumption of everything in [`crate::lab`].  The
/// pair-sum identity needs no such hypothesis, and the dominance gap is
/// only guaranteed nonnegative under conjugate symmetry.
pub fn identity_residuals(s: &StatStructure, p: &[f64]) -> Result<IdentityResiduals> {
    let data = PointData::at(s, p)?;
    let bundle = bundle_from_data(&data);
    let n = data.n;

    // [K,K]^l_{ijk} = K^l_{im} K^m_{jk} - K^l_{jm} K^m_{ik}
    let mut pair_sum = 0.0_f64;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for kk in 0..n {
                    let mut comm = 0.0;
                    for m in 0..n {
                        comm += data.k.get(&[l, i, m]) * data.k.get(&[m, j, kk])
                            - data.k.get(&[l, j, m]) * data.k.get(&[m, i, kk]);
                    }
                    let idx = [l, i, j, kk];
                    let v = bundle.r.get(&idx) + bundle.r_dual.get(&idx)
                        - 2.0 * bundle.r_metric.get(&idx)
                        - 2.0 * comm;
                    pair_sum = pair_sum.max(v.abs());
                }
            }
        }
    }

    // tr(K_j K_k) = K^i_{jm} K^m_{ki}
    let mut ricci_sum = 0.0_f64;
    for j in 0..n {
        for kk in 0..n {
            let mut tr = 0.0;
            for i in 0..n {
                for m in 0..n {
                    tr += data.k.get(&[i, j, m]) * data.k.get(&[m, kk, i]);
                }
            }
            let v = bundle.ric.get(&[j, kk]) + bundle.ric_dual.get(&[j, kk])
                - 2.0 * bundle.ric_metric.get(&[j, kk])
                + 2.0 * tr;
            ricci_sum = ricci_sum.max(v.abs());
        }
    }

    let norm_sq = crate::chart::cubic_norm_sq(&data.a, &data.ginv);
    let scalar_norm = (bundle.scalar_metric - bundle.scalar - norm_sq).abs();

    // min eigenvalue of sym(R̂ic - Ric)
    let mut diff = nalgebra::DMatrix::zeros(n, n);
    for j in 0..n {
        for kk in 0..n {
            let d = bundle.ric_metric.get(&[j, kk]) - bundle.ric.get(&[j, kk]);
            diff[(j, kk)] = d;
        }
    }
    let sym = 0.5 * (&diff + diff.transpose());
    let ricci_dominance_gap = sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));

    Ok(IdentityResiduals {
        pair_sum,
        ricci_sum,
        scalar_norm,
        ricci_dominance_gap,
    })
}

/// Off-diagonal curvature components `g(R(f_i, f_j) f_j, f_l)`, `l ∉ {i,j}`,
/// in the `g`-orthonormal frame obtained from the coordinate basis.
/// Requires dimension at least 3 (no off-diagonal slots exist below that).
pub fn projective_witness_at(s: &StatStructure, p: &[f64]) -> Result<WitnessReport> {
    let n = s.dim();
    if n < 3 {
        return Err(Error::Precondition {
            message: format!("projective witness needs dimension >= 3, got {n}"),
        });
    }
    let data = PointData::at(s, p)?;
    let bundle = bundle_from_data(&data);
    let basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })
        .collect();
    let frame = orthonormalize(s, p, &basis)?;
    let low = lower_curvature(&bundle.r, &data.g);

    let mut components = BTreeMap::new();
    let mut max_abs = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            for l in 0..n {
                if l == i || l == j {
                    continue;
                }
                let mut v = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for d in 0..n {
                                v += low.get(&[a, b, c, d])
                                    * frame[i][a]
                                    * frame[j][b]
                                    * frame[j][c]
                                    * frame[l][d];
                            }
                        }
                    }
                }
                components.insert(format!("{},{},{}", i + 1, j + 1, l + 1), v);
                max_abs = max_abs.max(v.abs());
            }
        }
    }
    Ok(WitnessReport {
        components,
        max_abs,
    })
}
