//! Coordinate charts and statistical structures.
//!
//! A [`Chart`] is an axis-aligned box in `R^n` with per-axis sample counts;
//! "the chart grid" always means the open uniform grid (every sample point
//! strictly interior), so finite-difference stencils and boundary-singular
//! metrics are both safe by construction.
//!
//! A [`StatStructure`] couples a chart with symbolic component fields: the
//! metric `g` (symmetric, positive definite pointwise) and the cubic form
//! `A` (fully symmetric).  First and second coordinate partials of every
//! component are differentiated once at construction time and cached, so
//! downstream curvature code never re-derives expressions in inner loops —
//! and never touches finite differences.

use crate::error::Error;
use crate::expr::Expr;
use crate::tensor::{Symmetry, TensorValue, Variance};
use crate::tol;
use crate::Result;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Axis-aligned coordinate box with per-axis grid counts.
#[derive(Debug, Clone)]
pub struct Chart {
    n: usize,
    bounds: Vec<(f64, f64)>,
    grid: Vec<usize>,
}

impl Chart {
    /// `bounds[i] = (lo, hi)` with `lo < hi`; `grid[i] >= 1` sample points
    /// per axis.  Dimension must be at least 2.
    pub fn new(bounds: Vec<(f64, f64)>, grid: Vec<usize>) -> Result<Chart> {
        let n = bounds.len();
        if n < 2 {
            return Err(Error::InvalidChart {
                message: format!("dimension {n} < 2"),
            });
        }
        if grid.len() != n {
            return Err(Error::InvalidChart {
                message: format!("{} grid counts for {} axes", grid.len(), n),
            });
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidChart {
                    message: format!("axis {} bounds [{lo}, {hi}] are not an interval", i + 1),
                });
            }
        }
        if let Some(i) = grid.iter().position(|&c| c == 0) {
            return Err(Error::InvalidChart {
                message: format!("axis {} has zero grid points", i + 1),
            });
        }
        Ok(Chart { n, bounds, grid })
    }

    /// `[-1, 1]^n` with a modest default grid.
    pub fn unit_box(n: usize) -> Result<Chart> {
        let grid = Chart::default_grid(n);
        Chart::new(vec![(-1.0, 1.0); n], grid)
    }

    /// Per-axis counts that keep the full grid around a few hundred points.
    pub fn default_grid(n: usize) -> Vec<usize> {
        let per_axis = match n {
            0..=3 => 5,
            4 => 4,
            _ => 3,
        };
        vec![per_axis; n]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    /// Replace the per-axis counts (used by the CLI `--grid` override).
    pub fn with_grid(mut self, grid: Vec<usize>) -> Result<Chart> {
        if grid.len() != self.n || grid.iter().any(|&c| c == 0) {
            return Err(Error::InvalidChart {
                message: format!("grid override {:?} does not fit dimension {}", grid, self.n),
            });
        }
        self.grid = grid;
        Ok(self)
    }

    /// Point lies in the closed box.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.n
            && p.iter()
                .zip(&self.bounds)
                .all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }

    fn check_contains(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                message: format!("{p:?} not in {:?}", self.bounds),
            })
        }
    }

    /// The open uniform grid: axis `i` contributes `grid[i]` points at
    /// `lo + (k+1) (hi-lo)/(grid[i]+1)`, so no sample touches the boundary.
    /// Points come out in row-major order, last axis fastest.
    pub fn grid_points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .bounds
            .iter()
            .zip(&self.grid)
            .map(|(&(lo, hi), &count)| {
                (0..count)
                    .map(|k| lo + (k as f64 + 1.0) * (hi - lo) / (count as f64 + 1.0))
                    .collect()
            })
            .collect();
        let total: usize = self.grid.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.n];
        'outer: loop {
            out.push(idx.iter().enumerate().map(|(i, &k)| axes[i][k]).collect());
            // mixed-radix increment, last axis fastest
            for axis in (0..self.n).rev() {
                idx[axis] += 1;
                if idx[axis] < self.grid[axis] {
                    continue 'outer;
                }
                idx[axis] = 0;
            }
            break;
        }
        out
    }

    /// Center of the box.
    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Shortest half-extent of the box, a safe scale for FD steps near the
    /// center.
    pub fn min_half_extent(&self) -> f64 {
        self.bounds
            .iter()
            .map(|&(lo, hi)| 0.5 * (hi - lo))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Field selector for [`fd_partial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Metric,
    Cubic,
}

// ---------------------------------------------------------------------------
// symmetric expression stores
// ---------------------------------------------------------------------------

/// Packed store for a symmetric rank-2 field with cached partials.
#[derive(Clone)]
struct SymStore2 {
    n: usize,
    entries: Vec<Expr>,           // slot per i <= j
    d1: Vec<Vec<Expr>>,           // [slot][k]
    d2: Vec<Vec<Expr>>,           // [slot][pair(k,l)], k <= l
}

#[inline]
fn pair_slot(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

#[inline]
fn triple_slot(n: usize, i: usize, j: usize, k: usize) -> usize {
    let mut v = [i, j, k];
    v.sort_unstable();
    let [a, b, c] = v;
    // Rank of sorted (a<=b<=c) among all sorted triples over 0..n:
    // count triples with first index < a, then pairs with first < b in the
    // remaining (n-a)-block, then offset c.
    let block3 = |m: usize| m * (m + 1) * (m + 2) / 6; // #sorted triples over m symbols
    let block2 = |m: usize| m * (m + 1) / 2;
    (block3(n) - block3(n - a)) + (block2(n - a) - block2(n - b)) + (c - b)
}

impl SymStore2 {
    fn build(n: usize, entries: Vec<Expr>) -> SymStore2 {
        debug_assert_eq!(entries.len(), n * (n + 1) / 2);
        let d1: Vec<Vec<Expr>> = entries
            .iter()
            .map(|e| (0..n).map(|k| e.differentiate(k)).collect())
            .collect();
        let d2: Vec<Vec<Expr>> = d1
            .iter()
            .map(|dk| {
                let mut out = Vec::with_capacity(n * (n + 1) / 2);
                for k in 0..n {
                    for l in k..n {
                        out.push(dk[k].differentiate(l));
                    }
                }
                out
            })
            .collect();
        SymStore2 { n, entries, d1, d2 }
    }

    fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[pair_slot(self.n, i, j)]
    }

    fn eval_at(&self, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let mut t = TensorValue::zeros(n, &[Variance::Down, Variance::Down])
            .with_symmetry(Symmetry::Symmetric(0, 1));
        for i in 0..n {
            for j in i..n {
                let v = self.entry(i, j).eval(p)?;
                t.set(&[i, j], v);
                t.set(&[j, i], v);
            }
        }
        Ok(t)
    }

    /// `out[k][i][j] = ∂_k g_{ij}` (coordinate partial, not tensorial).
    fn partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let mut t = TensorValue::zeros(n, &[Variance::Down; 3])
            .with_symmetry(Symmetry::Symmetric(1, 2));
        for i in 0..n {
            for j in i..n {
                let slot = pair_slot(n, i, j);
                for k in 0..n {
                    let v = self.d1[slot][k].eval(p)?;
                    t.set(&[k, i, j], v);
                    t.set(&[k, j, i], v);
                }
            }
        }
        Ok(t)
    }

    /// `out[k][l][i][j] = ∂_k ∂_l g_{ij}`.
    fn second_partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let mut t = TensorValue::zeros(n, &[Variance::Down; 4])
            .with_symmetry(Symmetry::Symmetric(0, 1))
            .with_symmetry(Symmetry::Symmetric(2, 3));
        for i in 0..n {
            for j in i..n {
                let slot = pair_slot(n, i, j);
                for k in 0..n {
                    for l in k..n {
                        let v = self.d2[slot][pair_slot(n, k, l)].eval(p)?;
                        for (a, b) in [(k, l), (l, k)] {
                            t.set(&[a, b, i, j], v);
                            t.set(&[a, b, j, i], v);
                        }
                    }
                }
            }
        }
        Ok(t)
    }
}

/// Packed store for a fully symmetric rank-3 field with cached partials.
#[derive(Clone)]
struct SymStore3 {
    n: usize,
    entries: Vec<Expr>,
    d1: Vec<Vec<Expr>>,
    d2: Vec<Vec<Expr>>,
}

impl SymStore3 {
    fn len(n: usize) -> usize {
        n * (n + 1) * (n + 2) / 6
    }

    fn build(n: usize, entries: Vec<Expr>) -> SymStore3 {
        debug_assert_eq!(entries.len(), Self::len(n));
        let d1: Vec<Vec<Expr>> = entries
            .iter()
            .map(|e| (0..n).map(|k| e.differentiate(k)).collect())
            .collect();
        let d2: Vec<Vec<Expr>> = d1
            .iter()
            .map(|dk| {
                let mut out = Vec::with_capacity(n * (n + 1) / 2);
                for k in 0..n {
                    for l in k..n {
                        out.push(dk[k].differentiate(l));
                    }
                }
                out
            })
            .collect();
        SymStore3 { n, entries, d1, d2 }
    }

    fn entry(&self, i: usize, j: usize, k: usize) -> &Expr {
        &self.entries[triple_slot(self.n, i, j, k)]
    }

    fn eval_at(&self, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let mut t = TensorValue::zeros(n, &[Variance::Down; 3])
            .with_symmetry(Symmetry::Symmetric(0, 1))
            .with_symmetry(Symmetry::Symmetric(1, 2));
        let mut cache = vec![f64::NAN; Self::len(n)];
        for idx in t.indices() {
            let slot = triple_slot(n, idx[0], idx[1], idx[2]);
            if cache[slot].is_nan() {
                cache[slot] = self.entries[slot].eval(p)?;
            }
            t.set(&idx, cache[slot]);
        }
        Ok(t)
    }

    /// `out[l][i][j][k] = ∂_l A_{ijk}`.
    fn partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let mut t = TensorValue::zeros(n, &[Variance::Down; 4])
            .with_symmetry(Symmetry::Symmetric(1, 2))
            .with_symmetry(Symmetry::Symmetric(2, 3));
        let mut cache = vec![f64::NAN; Self::len(n) * n];
        for idx in t.indices() {
            let slot = triple_slot(n, idx[1], idx[2], idx[3]);
            let key = slot * n + idx[0];
            if cache[key].is_nan() {
                cache[key] = self.d1[slot][idx[0]].eval(p)?;
            }
            t.set(&idx, cache[key]);
        }
        Ok(t)
    }

    /// `out[l][m][i][j][k] = ∂_l ∂_m A_{ijk}`.
    fn second_partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        let n = self.n;
        let mut t = TensorValue::zeros(n, &[Variance::Down; 5])
            .with_symmetry(Symmetry::Symmetric(0, 1))
            .with_symmetry(Symmetry::Symmetric(3, 4));
        let npairs = n * (n + 1) / 2;
        let mut cache = vec![f64::NAN; Self::len(n) * npairs];
        for idx in t.indices() {
            let slot = triple_slot(n, idx[2], idx[3], idx[4]);
            let pslot = pair_slot(n, idx[0], idx[1]);
            let key = slot * npairs + pslot;
            if cache[key].is_nan() {
                cache[key] = self.d2[slot][pslot].eval(p)?;
            }
            t.set(&idx, cache[key]);
        }
        Ok(t)
    }
}

// ---------------------------------------------------------------------------
// builder
// ---------------------------------------------------------------------------

/// Assembles a [`StatStructure`] from individual components with duplicate
/// detection.  Indices are zero-based and order-insensitive: `metric(0, 1)`
/// and `metric(1, 0)` name the same slot, and naming it twice is an error.
pub struct StructureBuilder {
    chart: Chart,
    g: BTreeMap<(usize, usize), Expr>,
    a: BTreeMap<(usize, usize, usize), Expr>,
}

impl StructureBuilder {
    pub fn new(chart: Chart) -> StructureBuilder {
        StructureBuilder {
            chart,
            g: BTreeMap::new(),
            a: BTreeMap::new(),
        }
    }

    pub fn metric(mut self, i: usize, j: usize, e: Expr) -> Result<StructureBuilder> {
        let n = self.chart.dim();
        if i >= n || j >= n {
            return Err(Error::spec(format!(
                "metric index ({}, {}) out of range for dimension {n}",
                i + 1,
                j + 1
            )));
        }
        let key = (i.min(j), i.max(j));
        if self.g.insert(key, e).is_some() {
            return Err(Error::spec(format!(
                "metric component ({}, {}) given more than once",
                key.0 + 1,
                key.1 + 1
            )));
        }
        Ok(self)
    }

    pub fn cubic(mut self, i: usize, j: usize, k: usize, e: Expr) -> Result<StructureBuilder> {
        let n = self.chart.dim();
        if i >= n || j >= n || k >= n {
            return Err(Error::spec(format!(
                "cubic index ({}, {}, {}) out of range for dimension {n}",
                i + 1,
                j + 1,
                k + 1
            )));
        }
        let mut key = [i, j, k];
        key.sort_unstable();
        if self.a.insert((key[0], key[1], key[2]), e).is_some() {
            return Err(Error::spec(format!(
                "cubic component ({}, {}, {}) given more than once",
                key[0] + 1,
                key[1] + 1,
                key[2] + 1
            )));
        }
        Ok(self)
    }

    /// Missing metric components default to `δ_ij`, missing cubic
    /// components to zero.
    pub fn build(self) -> Result<StatStructure> {
        let n = self.chart.dim();
        for (key, e) in self.g.iter().map(|(k, e)| (format!("g({},{})", k.0 + 1, k.1 + 1), e))
            .chain(self.a.iter().map(|(k, e)| (format!("A({},{},{})", k.0 + 1, k.1 + 1, k.2 + 1), e)))
        {
            if let Some(axis) = e.max_axis() {
                if axis >= n {
                    return Err(Error::spec(format!(
                        "component {key} references x{} but the dimension is {n}",
                        axis + 1
                    )));
                }
            }
        }

        let mut g_entries = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let default = if i == j { 1.0 } else { 0.0 };
                g_entries.push(
                    self.g
                        .get(&(i, j))
                        .cloned()
                        .unwrap_or(Expr::Const(default)),
                );
            }
        }
        let mut a_entries = Vec::with_capacity(SymStore3::len(n));
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    a_entries.push(self.a.get(&(i, j, k)).cloned().unwrap_or(Expr::Const(0.0)));
                }
            }
        }

        Ok(StatStructure {
            chart: self.chart,
            g: SymStore2::build(n, g_entries),
            a: SymStore3::build(n, a_entries),
        })
    }
}

// ---------------------------------------------------------------------------
// the structure itself
// ---------------------------------------------------------------------------

/// A statistical structure on a chart: metric `g` and fully symmetric cubic
/// form `A`, both as symbolic component fields with cached partials.
#[derive(Clone)]
pub struct StatStructure {
    chart: Chart,
    g: SymStore2,
    a: SymStore3,
}

impl StatStructure {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// The symbolic metric component `g_{ij}` (zero-based, order-free).
    pub fn metric_entry(&self, i: usize, j: usize) -> &Expr {
        self.g.entry(i, j)
    }

    /// The symbolic cubic component `A_{ijk}` (zero-based, order-free).
    pub fn cubic_entry(&self, i: usize, j: usize, k: usize) -> &Expr {
        self.a.entry(i, j, k)
    }

    /// Same chart, cubic form scaled by `alpha` (derivative caches rebuilt).
    pub fn scale_cubic(&self, alpha: f64) -> StatStructure {
        let entries = self
            .a
            .entries
            .iter()
            .map(|e| Expr::mul(Expr::Const(alpha), e.clone()))
            .collect();
        StatStructure {
            chart: self.chart.clone(),
            g: self.g.clone(),
            a: SymStore3::build(self.dim(), entries),
        }
    }

    /// Same structure on a re-gridded chart.
    pub fn with_grid(&self, grid: Vec<usize>) -> Result<StatStructure> {
        let chart = self.chart.clone().with_grid(grid)?;
        Ok(StatStructure {
            chart,
            g: self.g.clone(),
            a: self.a.clone(),
        })
    }

    /// Metric value at `p`: `(g, g^{-1})`, both symmetric.  Fails if `p` is
    /// outside the chart or `g(p)` is not positive definite; the inverse is
    /// Cholesky-based and validated against `g g^{-1} = I`.
    pub fn metric_at(&self, p: &[f64]) -> Result<(TensorValue, TensorValue)> {
        self.chart.check_contains(p)?;
        let g = self.g.eval_at(p)?;
        let n = self.dim();
        let m = to_dmatrix(&g);
        let chol = match m.clone().cholesky() {
            Some(c) => c,
            None => {
                let min_eig = m
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .fold(f64::INFINITY, |a, &b| a.min(b));
                return Err(Error::NotPositiveDefinite {
                    point: p.to_vec(),
                    min_eig,
                });
            }
        };
        let inv = chol.inverse();
        let mut ginv = TensorValue::zeros(n, &[Variance::Up, Variance::Up])
            .with_symmetry(Symmetry::Symmetric(0, 1));
        for i in 0..n {
            for j in i..n {
                let v = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                ginv.set(&[i, j], v);
                ginv.set(&[j, i], v);
            }
        }
        // Guard against a numerically successful but useless factorization.
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += g.get(&[i, k]) * ginv.get(&[k, j]);
                }
                worst = worst.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        if worst > tol::METRIC_INVERSE {
            return Err(Error::Precondition {
                message: format!(
                    "metric at {p:?} too ill-conditioned to invert (residual {worst:.3e})"
                ),
            });
        }
        Ok((g, ginv))
    }

    /// Cubic form value at `p` (fully symmetric rank 3).
    pub fn cubic_at(&self, p: &[f64]) -> Result<TensorValue> {
        self.chart.check_contains(p)?;
        self.a.eval_at(p)
    }

    /// Coordinate partials `∂_k g_{ij}` at `p` — exact, from the cached
    /// symbolic derivatives.  Layout `[k][i][j]`.
    pub fn metric_partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        self.chart.check_contains(p)?;
        self.g.partials_at(p)
    }

    /// `∂_k ∂_l g_{ij}` at `p`, layout `[k][l][i][j]`.
    pub fn metric_second_partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        self.chart.check_contains(p)?;
        self.g.second_partials_at(p)
    }

    /// `∂_l A_{ijk}` at `p`, layout `[l][i][j][k]`.
    pub fn cubic_partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        self.chart.check_contains(p)?;
        self.a.partials_at(p)
    }

    /// `∂_l ∂_m A_{ijk}` at `p`, layout `[l][m][i][j][k]`.
    pub fn cubic_second_partials_at(&self, p: &[f64]) -> Result<TensorValue> {
        self.chart.check_contains(p)?;
        self.a.second_partials_at(p)
    }

    /// Squared norm `‖A‖²_g = A_{ijk} A_{lmn} g^{il} g^{jm} g^{kn}` at `p`.
    pub fn cubic_norm_sq_at(&self, p: &[f64]) -> Result<f64> {
        let (_, ginv) = self.metric_at(p)?;
        let a = self.cubic_at(p)?;
        Ok(cubic_norm_sq(&a, &ginv))
    }
}

/// `A_{ijk} A_{lmn} g^{il} g^{jm} g^{kn}` for already-evaluated tensors.
pub fn cubic_norm_sq(a: &TensorValue, ginv: &TensorValue) -> f64 {
    let n = a.dim();
    // Raise all three indices once, then contract: O(n^4) instead of n^6.
    let mut up1 = TensorValue::zeros(n, &[Variance::Up, Variance::Down, Variance::Down]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv.get(&[i, l]) * a.get(&[l, j, k]);
                }
                up1.set(&[i, j, k], s);
            }
        }
    }
    let mut up2 = TensorValue::zeros(n, &[Variance::Up, Variance::Up, Variance::Down]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv.get(&[j, l]) * up1.get(&[i, l, k]);
                }
                up2.set(&[i, j, k], s);
            }
        }
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv.get(&[k, l]) * up2.get(&[i, j, l]);
                }
                total += s * a.get(&[i, j, k]);
            }
        }
    }
    total
}

pub(crate) fn to_dmatrix(t: &TensorValue) -> DMatrix<f64> {
    let n = t.dim();
    DMatrix::from_fn(n, n, |i, j| t.get(&[i, j]))
}

/// Gram–Schmidt a spanning set into a `g(p)`-orthonormal frame.
///
/// Vectors are processed in order (modified Gram–Schmidt), so the result is
/// deterministic; near-linear-dependence (squared norm collapsing below
/// `1e-12` of the original) is a [`Error::DegenerateInput`].
pub fn orthonormalize(
    s: &StatStructure,
    p: &[f64],
    vectors: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    let (g, _) = s.metric_at(p)?;
    let n = s.dim();
    for (a, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DegenerateInput {
                message: format!("vector {a} has length {} in dimension {n}", v.len()),
            });
        }
    }
    let dot = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += u[i] * g.get(&[i, j]) * v[j];
            }
        }
        acc
    };
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (a, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        let original = dot(v, v);
        if original <= 0.0 {
            return Err(Error::DegenerateInput {
                message: format!("vector {a} has non-positive g-norm"),
            });
        }
        for f in &frame {
            let c = dot(&w, f);
            for i in 0..n {
                w[i] -= c * f[i];
            }
        }
        let nsq = dot(&w, &w);
        if nsq < tol::DEGENERATE_GRAM * original {
            return Err(Error::DegenerateInput {
                message: format!("vector {a} is linearly dependent on its predecessors"),
            });
        }
        let inv = nsq.sqrt().recip();
        for x in &mut w {
            *x *= inv;
        }
        frame.push(w);
    }
    Ok(frame)
}

/// Central difference `∂_axis` of a whole component field at `p`.
///
/// Returns the full componentwise derivative tensor (`[i][j]` for the
/// metric, `[i][j][k]` for the cubic form).  This is the deliberately
/// derivative-cache-free cross-check path: it only ever evaluates the
/// undifferentiated component expressions.  With `richardson`, one
/// extrapolation step over steps `h` and `h/2` removes the leading `h²`
/// truncation term.
pub fn fd_partial(
    s: &StatStructure,
    field: Field,
    p: &[f64],
    axis: usize,
    h: f64,
    richardson: bool,
) -> Result<TensorValue> {
    let n = s.dim();
    if axis >= n {
        return Err(Error::Precondition {
            message: format!("axis {axis} out of range for dimension {n}"),
        });
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Precondition {
            message: format!("step {h} must be positive and finite"),
        });
    }
    let shifted = |delta: f64| -> Vec<f64> {
        let mut q = p.to_vec();
        q[axis] += delta;
        q
    };
    if !s.chart().contains(&shifted(h)) || !s.chart().contains(&shifted(-h)) {
        return Err(Error::OutsideDomain {
            message: format!("stencil {p:?} ± {h} e{} leaves the chart box", axis + 1),
        });
    }
    let eval = |q: &[f64]| -> Result<TensorValue> {
        match field {
            Field::Metric => s.g.eval_at(q),
            Field::Cubic => s.a.eval_at(q),
        }
    };
    let central = |h: f64| -> Result<TensorValue> {
        let plus = eval(&shifted(h))?;
        let minus = eval(&shifted(-h))?;
        let mut out = plus;
        let scale = 0.5 / h;
        for (o, m) in out.as_mut_slice().iter_mut().zip(minus.as_slice()) {
            *o = (*o - m) * scale;
        }
        Ok(out)
    };
    if !richardson {
        return central(h);
    }
    // D(h/2) has one quarter of D(h)'s h² error: (4 D(h/2) - D(h)) / 3.
    let coarse = central(h)?;
    let mut fine = central(0.5 * h)?;
    for (f, c) in fine.as_mut_slice().iter_mut().zip(coarse.as_slice()) {
        *f = (4.0 * *f - c) / 3.0;
    }
    Ok(fine)
}
