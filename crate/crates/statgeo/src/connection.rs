//! Connections attached to a statistical structure.
//!
//! From the metric's cached partials this module assembles the Levi-Civita
//! connection `∇̂` and its coordinate derivative, then splits the
//! statistical pair off the cubic form: `∇ = ∇̂ + K` and its dual
//! `∇* = ∇̂ - K`, where `K` is `A` with the last index raised.  Everything
//! downstream (curvature, Laplacians) consumes the [`PointData`] snapshot
//! computed here, so each formula lives in exactly one place.
//!
//! Index conventions: connection coefficients store the upper index first,
//! `Γ[l][i][j] = Γ^l_{ij}` with `∇_{∂_i} ∂_j = Γ^l_{ij} ∂_l`; the covariant
//! derivative of the cubic form puts the derivative slot first,
//! `(∇̂A)[l][i][j][k] = (∇̂_{∂_l} A)(∂_i, ∂_j, ∂_k)`.

use crate::chart::StatStructure;
use crate::error::Error;
use crate::expr::Expr;
use crate::tensor::{Symmetry, TensorValue, Variance};
use crate::Result;

/// Coefficients `Γ^l_{ij}` of a torsion-free connection at one point,
/// upper index first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoeffs {
    n: usize,
    data: Vec<f64>,
}

impl ConnectionCoeffs {
    pub fn zeros(n: usize) -> ConnectionCoeffs {
        ConnectionCoeffs {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, l: usize, i: usize, j: usize) -> f64 {
        self.data[(l * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, l: usize, i: usize, j: usize, v: f64) {
        self.data[(l * self.n + i) * self.n + j] = v;
    }

    /// Max deviation from symmetry in the two lower slots (torsion).
    pub fn torsion_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 0..self.n {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    worst = worst.max((self.get(l, i, j) - self.get(l, j, i)).abs());
                }
            }
        }
        worst
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Levi-Civita, primal, and dual coefficients at one point.
#[derive(Debug, Clone)]
pub struct ConnectionTriple {
    pub levi_civita: ConnectionCoeffs,
    pub primal: ConnectionCoeffs,
    pub dual: ConnectionCoeffs,
}

/// Residuals of the two defining constraints of the structures studied
/// here: total symmetry of `∇g` (Codazzi) and vanishing `g`-trace of `A`.
#[derive(Debug, Clone, Copy)]
pub struct StructureResiduals {
    /// Max asymmetry of `(∇g)(X, Y, Z)` over slot transpositions, with
    /// `∇g` assembled from the primal coefficients and symbolic `∂g`.
    pub codazzi: f64,
    /// `max_i |g^{jk} A_{ijk}|`.
    pub trace_free: f64,
}

/// Everything the curvature and Laplacian formulas need at one point,
/// evaluated once from the symbolic caches.
pub(crate) struct PointData {
    pub n: usize,
    pub g: TensorValue,
    pub ginv: TensorValue,
    /// `[k][i][j] = ∂_k g_{ij}`
    pub dg: TensorValue,
    /// `[k][i][j] = ∂_k (g^{-1})^{ij} = -(g^{-1} ∂_k g g^{-1})^{ij}`
    pub dginv: TensorValue,
    pub gamma: ConnectionCoeffs,
    /// `[k][l][i][j] = ∂_k Γ^l_{ij}` (Levi-Civita)
    pub dgamma: TensorValue,
    pub a: TensorValue,
    /// `[l][i][j][k] = ∂_l A_{ijk}`
    pub da: TensorValue,
    /// `[l][i][j] = K^l_{ij}` (difference tensor, upper index first)
    pub k: TensorValue,
    /// `[l][i][j][k] = (∇̂_{∂_l} A)(∂_i, ∂_j, ∂_k)`
    pub nabla_a: TensorValue,
}

impl PointData {
    pub fn at(s: &StatStructure, p: &[f64]) -> Result<PointData> {
        let n = s.dim();
        let (g, ginv) = s.metric_at(p)?;
        let dg = s.metric_partials_at(p)?;
        let d2g = s.metric_second_partials_at(p)?;
        let a = s.cubic_at(p)?;
        let da = s.cubic_partials_at(p)?;

        // ∂(g^{-1}) = -g^{-1} (∂g) g^{-1}
        let mut dginv = TensorValue::zeros(n, &[Variance::Down, Variance::Up, Variance::Up])
            .with_symmetry(Symmetry::Symmetric(1, 2));
        for kk in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut sum = 0.0;
                    for pp in 0..n {
                        for q in 0..n {
                            sum -= ginv.get(&[i, pp]) * dg.get(&[kk, pp, q]) * ginv.get(&[q, j]);
                        }
                    }
                    dginv.set(&[kk, i, j], sum);
                }
            }
        }

        // Γ^l_{ij} = ½ g^{lm} (∂_i g_{mj} + ∂_j g_{mi} - ∂_m g_{ij})
        let koszul = |i: usize, j: usize, m: usize| -> f64 {
            dg.get(&[i, m, j]) + dg.get(&[j, m, i]) - dg.get(&[m, i, j])
        };
        let mut gamma = ConnectionCoeffs::zeros(n);
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut sum = 0.0;
                    for m in 0..n {
                        sum += ginv.get(&[l, m]) * koszul(i, j, m);
                    }
                    let v = 0.5 * sum;
                    gamma.set(l, i, j, v);
                    gamma.set(l, j, i, v);
                }
            }
        }

        // ∂_k Γ^l_{ij}: product rule over the Koszul formula.
        let mut dgamma = TensorValue::zeros(
            n,
            &[Variance::Down, Variance::Up, Variance::Down, Variance::Down],
        )
        .with_symmetry(Symmetry::Symmetric(2, 3));
        let dkoszul = |kk: usize, i: usize, j: usize, m: usize| -> f64 {
            d2g.get(&[kk, i, m, j]) + d2g.get(&[kk, j, m, i]) - d2g.get(&[kk, m, i, j])
        };
        for kk in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let mut sum = 0.0;
                        for m in 0..n {
                            sum += dginv.get(&[kk, l, m]) * koszul(i, j, m)
                                + ginv.get(&[l, m]) * dkoszul(kk, i, j, m);
                        }
                        let v = 0.5 * sum;
                        dgamma.set(&[kk, l, i, j], v);
                        dgamma.set(&[kk, l, j, i], v);
                    }
                }
            }
        }

        // K^l_{ij} = g^{lm} A_{ijm}
        let mut k = TensorValue::zeros(n, &[Variance::Up, Variance::Down, Variance::Down])
            .with_symmetry(Symmetry::Symmetric(1, 2));
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut sum = 0.0;
                    for m in 0..n {
                        sum += ginv.get(&[l, m]) * a.get(&[i, j, m]);
                    }
                    k.set(&[l, i, j], sum);
                    k.set(&[l, j, i], sum);
                }
            }
        }

        // (∇̂_l A)_{ijk} = ∂_l A_{ijk} - Γ^m_{li} A_{mjk} - Γ^m_{lj} A_{imk}
        //                - Γ^m_{lk} A_{ijm}
        let mut nabla_a = TensorValue::zeros(n, &[Variance::Down; 4])
            .with_symmetry(Symmetry::Symmetric(1, 2))
            .with_symmetry(Symmetry::Symmetric(2, 3));
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for kk in 0..n {
                        let mut v = da.get(&[l, i, j, kk]);
                        for m in 0..n {
                            v -= gamma.get(m, l, i) * a.get(&[m, j, kk])
                                + gamma.get(m, l, j) * a.get(&[i, m, kk])
                                + gamma.get(m, l, kk) * a.get(&[i, j, m]);
                        }
                        nabla_a.set(&[l, i, j, kk], v);
                    }
                }
            }
        }

        Ok(PointData {
            n,
            g,
            ginv,
            dg,
            dginv,
            gamma,
            dgamma,
            a,
            da,
            k,
            nabla_a,
        })
    }
}

/// Levi-Civita coefficients of `g` at `p` (exact symbolic partials inside).
pub fn christoffel_at(s: &StatStructure, p: &[f64]) -> Result<ConnectionCoeffs> {
    Ok(PointData::at(s, p)?.gamma)
}

/// Difference tensor at `p`: `K^l_{ij}` (upper index first) together with
/// the fully lowered cubic form `A_{ijk}` it was raised from.
pub fn difference_tensor_at(s: &StatStructure, p: &[f64]) -> Result<(TensorValue, TensorValue)> {
    let data = PointData::at(s, p)?;
    Ok((data.k, data.a))
}

/// The full connection triple `(∇̂, ∇, ∇*)` at `p`, with
/// `Γ = Γ̂ + K` and `Γ* = Γ̂ - K`.
pub fn connections_at(s: &StatStructure, p: &[f64]) -> Result<ConnectionTriple> {
    let data = PointData::at(s, p)?;
    let n = data.n;
    let mut primal = data.gamma.clone();
    let mut dual = data.gamma.clone();
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let kv = data.k.get(&[l, i, j]);
                primal.set(l, i, j, primal.get(l, i, j) + kv);
                dual.set(l, i, j, dual.get(l, i, j) - kv);
            }
        }
    }
    Ok(ConnectionTriple {
        levi_civita: data.gamma,
        primal,
        dual,
    })
}

/// Residual of the duality relation
/// `∂_i g_{jk} = g(∇_{∂_i} ∂_j, ∂_k) + g(∂_j, ∇*_{∂_i} ∂_k)`,
/// max over all index triples.
pub fn duality_residual(s: &StatStructure, p: &[f64]) -> Result<f64> {
    let data = PointData::at(s, p)?;
    let triple = connections_at(s, p)?;
    let n = data.n;
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                let mut lhs = 0.0;
                for m in 0..n {
                    lhs += triple.primal.get(m, i, j) * data.g.get(&[m, kk])
                        + triple.dual.get(m, i, kk) * data.g.get(&[j, m]);
                }
                worst = worst.max((lhs - data.dg.get(&[i, j, kk])).abs());
            }
        }
    }
    Ok(worst)
}

/// Max component of `∇̂g` assembled from the Levi-Civita coefficients — a
/// consistency check that the Koszul inversion really was metric.
pub fn metric_compatibility_residual(s: &StatStructure, p: &[f64]) -> Result<f64> {
    let data = PointData::at(s, p)?;
    let n = data.n;
    let mut worst = 0.0_f64;
    for kk in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = data.dg.get(&[kk, i, j]);
                for m in 0..n {
                    v -= data.gamma.get(m, kk, i) * data.g.get(&[m, j])
                        + data.gamma.get(m, kk, j) * data.g.get(&[i, m]);
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Codazzi and apolarity residuals of the structure at `p`.
pub fn structure_residuals(s: &StatStructure, p: &[f64]) -> Result<StructureResiduals> {
    let data = PointData::at(s, p)?;
    let triple = connections_at(s, p)?;
    let n = data.n;

    // (∇g)_{i;jk} = ∂_i g_{jk} - Γ^m_{ij} g_{mk} - Γ^m_{ik} g_{jm} with the
    // primal Γ; Codazzi means this rank-3 array is totally symmetric.
    let mut nabla_g = TensorValue::zeros(n, &[Variance::Down; 3]);
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                let mut v = data.dg.get(&[i, j, kk]);
                for m in 0..n {
                    v -= triple.primal.get(m, i, j) * data.g.get(&[m, kk])
                        + triple.primal.get(m, i, kk) * data.g.get(&[j, m]);
                }
                nabla_g.set(&[i, j, kk], v);
            }
        }
    }
    let mut codazzi = 0.0_f64;
    for idx in nabla_g.indices() {
        let (i, j, kk) = (idx[0], idx[1], idx[2]);
        let v = nabla_g.get(&idx);
        codazzi = codazzi
            .max((v - nabla_g.get(&[j, i, kk])).abs())
            .max((v - nabla_g.get(&[i, kk, j])).abs());
    }

    let mut trace_free = 0.0_f64;
    for x in 0..n {
        let mut t = 0.0;
        for j in 0..n {
            for kk in 0..n {
                t += data.ginv.get(&[j, kk]) * data.a.get(&[x, j, kk]);
            }
        }
        trace_free = trace_free.max(t.abs());
    }

    Ok(StructureResiduals {
        codazzi,
        trace_free,
    })
}

/// `(∇̂A)` at `p`, derivative slot first: `[l][i][j][k]`.
pub fn cubic_derivative_at(s: &StatStructure, p: &[f64]) -> Result<TensorValue> {
    Ok(PointData::at(s, p)?.nabla_a)
}

/// Second covariant derivative `(∇̂²A)[l][m][i][j][k] =
/// (∇̂_{∂_l} ∇̂_{∂_m} A)(∂_i,∂_j,∂_k) - (∇̂_{∇̂_{∂_l}∂_m} A)(...)`,
/// i.e. the tensorial Hessian of `A`.
pub fn cubic_hessian_at(s: &StatStructure, p: &[f64]) -> Result<TensorValue> {
    let data = PointData::at(s, p)?;
    let d2a = s.cubic_second_partials_at(p)?;
    let n = data.n;

    // ∂_l of (∇̂A)_{m,ijk}, by the product rule through the cached partials.
    let d_nabla = |l: usize, m: usize, i: usize, j: usize, kk: usize| -> f64 {
        let mut v = d2a.get(&[l, m, i, j, kk]);
        for r in 0..n {
            v -= data.dgamma.get(&[l, r, m, i]) * data.a.get(&[r, j, kk])
                + data.gamma.get(r, m, i) * data.da.get(&[l, r, j, kk])
                + data.dgamma.get(&[l, r, m, j]) * data.a.get(&[i, r, kk])
                + data.gamma.get(r, m, j) * data.da.get(&[l, i, r, kk])
                + data.dgamma.get(&[l, r, m, kk]) * data.a.get(&[i, j, r])
                + data.gamma.get(r, m, kk) * data.da.get(&[l, i, j, r]);
        }
        v
    };

    let mut hess = TensorValue::zeros(n, &[Variance::Down; 5]);
    for l in 0..n {
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for kk in 0..n {
                        let mut v = d_nabla(l, m, i, j, kk);
                        for r in 0..n {
                            v -= data.gamma.get(r, l, m) * data.nabla_a.get(&[r, i, j, kk])
                                + data.gamma.get(r, l, i) * data.nabla_a.get(&[m, r, j, kk])
                                + data.gamma.get(r, l, j) * data.nabla_a.get(&[m, i, r, kk])
                                + data.gamma.get(r, l, kk) * data.nabla_a.get(&[m, i, j, r]);
                        }
                        hess.set(&[l, m, i, j, kk], v);
                    }
                }
            }
        }
    }
    Ok(hess)
}

/// Rough Laplacian `(ΔA)_{ijk} = g^{lm} (∇̂²A)_{lm,ijk}` at `p`.
pub fn cubic_laplacian_at(s: &StatStructure, p: &[f64]) -> Result<TensorValue> {
    let data = PointData::at(s, p)?;
    let hess = cubic_hessian_at(s, p)?;
    let n = data.n;
    let mut lap = TensorValue::zeros(n, &[Variance::Down; 3])
        .with_symmetry(Symmetry::Symmetric(0, 1))
        .with_symmetry(Symmetry::Symmetric(1, 2));
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                let mut v = 0.0;
                for l in 0..n {
                    for m in 0..n {
                        v += data.ginv.get(&[l, m]) * hess.get(&[l, m, i, j, kk]);
                    }
                }
                lap.set(&[i, j, kk], v);
            }
        }
    }
    Ok(lap)
}

/// Laplace–Beltrami of a scalar expression at `p`:
/// `Δf = g^{ij} (∂_i ∂_j f - Γ^m_{ij} ∂_m f)`.
///
/// `f` must only reference coordinates of the structure's chart.
pub fn laplacian_scalar_at(s: &StatStructure, f: &Expr, p: &[f64]) -> Result<f64> {
    let n = s.dim();
    if let Some(axis) = f.max_axis() {
        if axis >= n {
            return Err(Error::Precondition {
                message: format!(
                    "scalar references x{} but the chart dimension is {n}",
                    axis + 1
                ),
            });
        }
    }
    let data = PointData::at(s, p)?;
    let df: Vec<f64> = (0..n)
        .map(|i| f.differentiate(i).eval(p))
        .collect::<Result<_>>()?;
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            let hij = f.differentiate(i).differentiate(j).eval(p)?;
            let mut v = hij;
            for m in 0..n {
                v -= data.gamma.get(m, i, j) * df[m];
            }
            lap += data.ginv.get(&[i, j]) * v;
        }
    }
    Ok(lap)
}
