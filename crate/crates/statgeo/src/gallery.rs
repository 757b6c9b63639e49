//! Built-in fixture structures.
//!
//! Each family lives behind the [`FixtureFamily`] trait and is registered
//! by name, so the CLI and spec files select fixtures at runtime without
//! knowing the concrete builders.  The four families: a trivial flat
//! structure, the constant all-distinct-triple cubic family, its
//! coordinate-linear cousin on the positive orthant, and a hyperbolic
//! plane used purely to calibrate the curvature pipeline against a known
//! value.

use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{Chart, StatStructure, StructureBuilder};
use crate::curvature::{conjugate_symmetry_report, projective_witness_at};
use crate::error::Error;
use crate::expr::Expr;
use crate::report::{Tolerances, VerificationReport};
use crate::{connection, tol, Result};

/// Parameters a family may consume; unknown fields are simply ignored by
/// families that have no use for them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixtureParams {
    /// Coefficient of the constant all-distinct-triple family.
    pub c: Option<f64>,
    /// Chart box override, one `(lo, hi)` pair per axis.
    pub bounds: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureSpec {
    pub name: String,
    pub n: usize,
    pub params: FixtureParams,
}

impl FixtureSpec {
    pub fn new(name: impl Into<String>, n: usize) -> FixtureSpec {
        FixtureSpec {
            name: name.into(),
            n,
            params: FixtureParams::default(),
        }
    }

    pub fn with_c(mut self, c: f64) -> FixtureSpec {
        self.params.c = Some(c);
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> FixtureSpec {
        self.params.bounds = Some(bounds);
        self
    }
}

/// A named structure family the registry can build on demand.
pub trait FixtureFamily: Sync + Send {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn default_dimension(&self) -> usize;
    fn build(&self, spec: &FixtureSpec) -> Result<StatStructure>;
}

struct Trivial;
struct ConstantDistinct;
struct LinearDistinct;
struct HyperbolicPlane;

fn chart_for(spec: &FixtureSpec, default: Vec<(f64, f64)>) -> Result<Chart> {
    let bounds = match &spec.params.bounds {
        Some(b) => {
            if b.len() != spec.n {
                return Err(Error::spec(format!(
                    "fixture '{}' has dimension {} but {} bound pairs were given",
                    spec.name,
                    spec.n,
                    b.len()
                )));
            }
            b.clone()
        }
        None => default,
    };
    Chart::new(bounds, Chart::default_grid(spec.n))
}

impl FixtureFamily for Trivial {
    fn name(&self) -> &'static str {
        "trivial"
    }
    fn describe(&self) -> &'static str {
        "flat metric, zero cubic form"
    }
    fn default_dimension(&self) -> usize {
        3
    }
    fn build(&self, spec: &FixtureSpec) -> Result<StatStructure> {
        let chart = chart_for(spec, vec![(-1.0, 1.0); spec.n])?;
        StructureBuilder::new(chart).build()
    }
}

impl FixtureFamily for ConstantDistinct {
    fn name(&self) -> &'static str {
        "constant_distinct"
    }
    fn describe(&self) -> &'static str {
        "flat metric; A_ijk = c on all-distinct index triples, 0 otherwise"
    }
    fn default_dimension(&self) -> usize {
        4
    }
    fn build(&self, spec: &FixtureSpec) -> Result<StatStructure> {
        if spec.n < 3 {
            return Err(Error::spec(
                "constant_distinct needs n >= 3 (its cubic lives on distinct triples)",
            ));
        }
        let c = spec.params.c.unwrap_or(1.0);
        if !(c > 0.0) {
            return Err(Error::spec(format!(
                "constant_distinct coefficient must be positive, got {c}"
            )));
        }
        let chart = chart_for(spec, vec![(-1.0, 1.0); spec.n])?;
        let mut b = StructureBuilder::new(chart);
        for i in 0..spec.n {
            for j in (i + 1)..spec.n {
                for k in (j + 1)..spec.n {
                    b = b.cubic(i, j, k, Expr::constant(c))?;
                }
            }
        }
        b.build()
    }
}

impl FixtureFamily for LinearDistinct {
    fn name(&self) -> &'static str {
        "linear_distinct"
    }
    fn describe(&self) -> &'static str {
        "flat metric on a positive box; A_ijk = sum of the coordinates whose index is outside {i,j,k}"
    }
    fn default_dimension(&self) -> usize {
        4
    }
    fn build(&self, spec: &FixtureSpec) -> Result<StatStructure> {
        if spec.n < 3 {
            return Err(Error::spec(
                "linear_distinct needs n >= 3 (its cubic lives on distinct triples)",
            ));
        }
        let chart = chart_for(spec, vec![(1.0, 2.0); spec.n])?;
        let mut b = StructureBuilder::new(chart);
        for i in 0..spec.n {
            for j in (i + 1)..spec.n {
                for k in (j + 1)..spec.n {
                    let mut e = Expr::constant(0.0);
                    for l in 0..spec.n {
                        if l != i && l != j && l != k {
                            e = Expr::add(e, Expr::coord(l));
                        }
                    }
                    if !e.is_zero() {
                        b = b.cubic(i, j, k, e)?;
                    }
                }
            }
        }
        b.build()
    }
}

impl FixtureFamily for HyperbolicPlane {
    fn name(&self) -> &'static str {
        "hyperbolic_plane"
    }
    fn describe(&self) -> &'static str {
        "half-plane metric g = identity / x2^2, zero cubic form; curvature calibration baseline"
    }
    fn default_dimension(&self) -> usize {
        2
    }
    fn build(&self, spec: &FixtureSpec) -> Result<StatStructure> {
        if spec.n != 2 {
            return Err(Error::spec("hyperbolic_plane is two-dimensional"));
        }
        let chart = chart_for(spec, vec![(-1.0, 1.0), (1.0, 3.0)])?;
        if chart.bounds()[1].0 <= 0.0 {
            return Err(Error::spec("hyperbolic_plane needs x2 > 0 on its box"));
        }
        let inv_sq = Expr::div(
            Expr::constant(1.0),
            Expr::pow(Expr::coord(1), Expr::constant(2.0)),
        );
        StructureBuilder::new(chart)
            .metric(0, 0, inv_sq.clone())?
            .metric(1, 1, inv_sq)?
            .build()
    }
}

static REGISTRY: Lazy<BTreeMap<&'static str, Box<dyn FixtureFamily>>> = Lazy::new(|| {
    let mut m: BTreeMap<&'static str, Box<dyn FixtureFamily>> = BTreeMap::new();
    for family in [
        Box::new(Trivial) as Box<dyn FixtureFamily>,
        Box::new(ConstantDistinct),
        Box::new(LinearDistinct),
        Box::new(HyperbolicPlane),
    ] {
        m.insert(family.name(), family);
    }
    m
});

/// Look a family up by its registered name.
pub fn family(name: &str) -> Option<&'static dyn FixtureFamily> {
    REGISTRY.get(name).map(|b| b.as_ref())
}

/// All registered families, in stable (alphabetical) order.
pub fn families() -> impl Iterator<Item = &'static dyn FixtureFamily> {
    REGISTRY.values().map(|b| b.as_ref())
}

/// Build a fixture from its spec, resolving the family by name.
pub fn build(spec: &FixtureSpec) -> Result<StatStructure> {
    match family(&spec.name) {
        Some(f) => f.build(spec),
        None => Err(Error::spec(format!(
            "unknown fixture '{}'; available: {}",
            spec.name,
            REGISTRY.keys().copied().collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// The α-deformation `(g, A) ↦ (g, α·A)`.
///
/// Both defining residuals survive the deformation: the derivative-symmetry
/// condition is linear in `A`, and apolarity is preserved by scaling.
pub fn alpha_transform(s: &StatStructure, alpha: f64) -> StatStructure {
    s.scale_cubic(alpha)
}

/// Flat structure with a constant, fully symmetric, trace-free cubic form
/// drawn from the seeded generator.  Entries start uniform in `[-1, 1]`
/// (canonical `i ≤ j ≤ k` slots), then the trace part is projected out.
pub fn random_trace_free_structure(n: usize, seed: u64) -> Result<StatStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut full = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                for perm in permutations3(i, j, k) {
                    full[(perm[0] * n + perm[1]) * n + perm[2]] = v;
                }
            }
        }
    }
    project_trace_free(&mut full, n);
    let chart = Chart::new(vec![(-1.0, 1.0); n], Chart::default_grid(n))?;
    let mut b = StructureBuilder::new(chart);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v = full[(i * n + j) * n + k];
                if v != 0.0 {
                    b = b.cubic(i, j, k, Expr::constant(v))?;
                }
            }
        }
    }
    b.build()
}

/// Same as [`random_trace_free_structure`] but with a coordinate-linear
/// perturbation on one component that breaks the derivative symmetry, so
/// every conjugate-symmetry residual becomes order `β` at generic points.
pub fn perturbed_structure(n: usize, seed: u64) -> Result<StatStructure> {
    let beta = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut full = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                for perm in permutations3(i, j, k) {
                    full[(perm[0] * n + perm[1]) * n + perm[2]] = v;
                }
            }
        }
    }
    project_trace_free(&mut full, n);
    let chart = Chart::new(vec![(-1.0, 1.0); n], Chart::default_grid(n))?;
    let mut b = StructureBuilder::new(chart);
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v = full[(i * n + j) * n + k];
                let mut e = Expr::constant(v);
                if (i, j, k) == (0, 0, 1) {
                    e = Expr::add(e, Expr::mul(Expr::constant(beta), Expr::coord(0)));
                }
                if !e.is_zero() {
                    b = b.cubic(i, j, k, e)?;
                }
            }
        }
    }
    b.build()
}

fn permutations3(i: usize, j: usize, k: usize) -> [[usize; 3]; 6] {
    [
        [i, j, k],
        [i, k, j],
        [j, i, k],
        [j, k, i],
        [k, i, j],
        [k, j, i],
    ]
}

/// Remove the metric-trace part of a fully symmetric 3-tensor (identity
/// metric): with `t_i = Σ_j T_ijj`, subtract
/// `(t_i δ_jk + t_j δ_ik + t_k δ_ij) / (n + 2)`.
fn project_trace_free(full: &mut [f64], n: usize) {
    let mut t = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            t[i] += full[(i * n + j) * n + j];
        }
    }
    let scale = 1.0 / (n as f64 + 2.0);
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
                full[(i * n + j) * n + k] -= scale * p;
            }
        }
    }
}

/// Aggregate the conjugate-symmetry residuals and the projective-flatness
/// witness over the whole grid.
///
/// Passes when the structure is conjugate symmetric at every grid point
/// *and* some distinct-index curvature component stays bounded away from
/// zero — the certificate that the structure cannot come from a flat
/// projective realization.
pub fn witness_report(s: &StatStructure, label: &str) -> Result<VerificationReport> {
    if s.dim() < 3 {
        return Err(Error::Precondition {
            message: "the projective witness needs three distinct frame indices (n >= 3)".into(),
        });
    }
    let mut report = VerificationReport::new(format!("witness {label}"), 0, Tolerances::default());
    let points = s.chart().grid_points();
    let mut gap = 0.0f64;
    let mut asym = 0.0f64;
    let mut skew = 0.0f64;
    let mut codazzi = 0.0f64;
    let mut trace = 0.0f64;
    let mut witness_min = f64::INFINITY;
    let mut witness_max = 0.0f64;
    for p in &points {
        let cs = conjugate_symmetry_report(s, p)?;
        gap = gap.max(cs.curvature_gap);
        asym = asym.max(cs.derivative_asymmetry);
        skew = skew.max(cs.skew_defect);
        let sr = connection::structure_residuals(s, p)?;
        codazzi = codazzi.max(sr.codazzi);
        trace = trace.max(sr.trace_free);
        let w = projective_witness_at(s, p)?;
        witness_min = witness_min.min(w.max_abs);
        witness_max = witness_max.max(w.max_abs);
    }
    report
        .residual("codazzi_max", codazzi, tol::RESIDUAL)
        .with_samples(points.len() as u64);
    report.residual("trace_free_max", trace, tol::RESIDUAL);
    report.residual("conjugate_symmetry.curvature_gap", gap, tol::RESIDUAL);
    report.residual("conjugate_symmetry.derivative_asymmetry", asym, tol::RESIDUAL);
    report.residual("conjugate_symmetry.skew_defect", skew, tol::RESIDUAL);
    report
        .slack("projective_witness.min_over_grid", witness_min, 1e-4)
        .with_detail(if witness_min >= 1e-4 {
            "conjugate symmetric, not projectively flat"
        } else {
            "no obstruction found at grid tolerance"
        });
    report.value("projective_witness.max_over_grid", witness_max);
    Ok(report)
}
