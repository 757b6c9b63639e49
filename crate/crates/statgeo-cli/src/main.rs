//! Command-line front end for the statistical-structure laboratory.
//!
//! Subcommands:
//! * `describe <spec>` — structural residuals and curvature summaries over
//!   the chart grid of a spec structure;
//! * `verify crucial` — randomized spectrum-pairing sweep;
//! * `verify nomizu` — commutator lower bound on random trace-free cubics;
//! * `verify gallery` — contract checks for every built-in fixture family;
//! * `verify section4 <spec>` — sphere-maximizer pipeline diagnostics;
//! * `bounds` — Ricci/scalar windows and the cubic-norm sup bound of a pinch;
//! * `witness <spec>` — conjugate-symmetry + projective-flatness certificate.
//!
//! Reports print to stdout as JSON (`--pretty` renders a table instead);
//! `--out` additionally writes the JSON to a file.  Exit status: 0 when all
//! verdicts pass, 1 when some check fails, 2 when the input cannot be
//! parsed or violates a precondition.  Two runs with the same arguments and
//! seed produce the same report, byte for byte, except for `timing_ms`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use statgeo::curvature::{self, Plane};
use statgeo::gallery::{self, FixtureSpec};
use statgeo::lab::pinch::{self, CurvaturePinch};
use statgeo::lab::{nomizu, optim, pairing, roots};
use statgeo::oracle;
use statgeo::report::{Tolerances, VerificationReport};
use statgeo::specfile::StructureSpecFile;
use statgeo::{connection, tol, Error, Result, StatStructure, TensorValue};

/// Residual bound every gallery fixture must meet; their components are
/// polynomial (or the hyperbolic reciprocal), so double arithmetic keeps
/// the exact identities near machine precision.
const GALLERY_RESIDUAL: f64 = 1e-10;

/// A fixture counts as "not projectively flat" when some distinct-index
/// frame component of the curvature stays above this at every grid point.
const WITNESS_FLOOR: f64 = 1e-4;

/// Budget for the hyperbolic fixture's sectional value through the
/// symbolic path.
const CALIBRATION_SYMBOLIC: f64 = 1e-9;

/// Budget for the same value through the finite-difference oracle.
const CALIBRATION_FD: f64 = 1e-5;

/// Agreement between the closed-form sup bound and the root solver.
const ROOT_AGREEMENT: f64 = 1e-12;

/// Dense-grid oracle budget for the sphere maximizer's value.
const GRID_ORACLE: f64 = 1e-6;

/// Sectional samples collected for `describe` summaries.
const DESCRIBE_PLANES: usize = 200;

#[derive(Parser)]
#[command(
    name = "statgeo",
    version,
    about = "Curvature reports and inequality verification for trace-free statistical structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Residual tolerance for identity checks.
    #[arg(long, global = true, default_value_t = tol::RESIDUAL)]
    tol_residual: f64,
    /// Slack floor for inequality checks (thresholds are -tol-slack).
    #[arg(long, global = true, default_value_t = tol::SLACK)]
    tol_slack: f64,
    /// Grid override for spec charts: one count for all axes, or a comma list.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Seed for every randomized draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Render the report as a fixed-width table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Structural residuals and curvature summaries over a spec structure's grid.
    Describe(SpecArg),
    /// Randomized and fixture verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Ricci/scalar windows and the cubic-norm sup bound implied by a pinch.
    Bounds(BoundsArgs),
    /// Conjugate-symmetry and projective-flatness certificate for a spec structure.
    Witness(SpecArg),
}

#[derive(Args)]
struct SpecArg {
    /// Path to a structure spec file (JSON).
    spec: PathBuf,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Spectrum-pairing sweep: random trace-free spectra, windowed sectional values.
    Crucial(CrucialArgs),
    /// Commutator-term lower bound on random trace-free cubic forms.
    Nomizu(NomizuArgs),
    /// Contract checks for every built-in fixture family.
    Gallery,
    /// Sphere-maximizer pipeline on a spec structure.
    Section4(Section4Args),
}

#[derive(Args)]
struct CrucialArgs {
    /// Spectrum dimension.
    #[arg(long)]
    n: usize,
    /// Sectional infimum of the pinch.
    #[arg(long, allow_hyphen_values = true)]
    h3: f64,
    /// Pinch width parameter.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    eps: f64,
    /// Number of random samples.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Args)]
struct NomizuArgs {
    /// Dimension; omit to run the whole 2..=5 suite.
    #[arg(long)]
    n: Option<usize>,
    /// Random cubic forms per dimension.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
}

#[derive(Args)]
struct Section4Args {
    /// Path to a structure spec file (JSON).
    spec: PathBuf,
    /// Ascent restarts (the best candidate wins deterministically).
    #[arg(long, default_value_t = 32)]
    restarts: usize,
}

#[derive(Args)]
struct BoundsArgs {
    /// Dimension of the model structure.
    #[arg(long)]
    n: usize,
    /// Sectional infimum (pinch parameterization, together with --eps).
    #[arg(long, allow_hyphen_values = true)]
    h3: Option<f64>,
    /// Pinch width; only meaningful next to --h3.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    /// Upper sectional bound (window parameterization, together with --h2).
    #[arg(long, allow_hyphen_values = true)]
    h1: Option<f64>,
    /// Lower sectional bound (window parameterization, together with --h1).
    #[arg(long, allow_hyphen_values = true)]
    h2: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        // Fresh process, so this only fails if a pool somehow exists
        // already; the existing pool then wins and the run stays valid.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let tolerances = Tolerances {
        residual: cli.global.tol_residual,
        slack: cli.global.tol_slack,
    };
    let started = Instant::now();
    let mut report = match run(&cli, tolerances) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    report.timing_ms = started.elapsed().as_millis();
    let json = report.to_json(true);
    if let Some(path) = &cli.global.out {
        if let Err(err) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("error: writing report to {}: {err}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.global.pretty {
        print!("{}", report.render_table());
    } else {
        println!("{json}");
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli, tolerances: Tolerances) -> Result<VerificationReport> {
    let seed = cli.global.seed;
    match &cli.command {
        Command::Describe(args) => {
            let (s, label) = load_structure(&args.spec, &cli.global)?;
            describe(&s, &label, seed, tolerances)
        }
        Command::Verify(VerifyCommand::Crucial(args)) => {
            pairing::crucial_report(args.n, args.h3, args.eps, args.samples, seed, tolerances)
        }
        Command::Verify(VerifyCommand::Nomizu(args)) => verify_nomizu(args, seed, tolerances),
        Command::Verify(VerifyCommand::Gallery) => verify_gallery(seed, tolerances),
        Command::Verify(VerifyCommand::Section4(args)) => {
            let (s, label) = load_structure(&args.spec, &cli.global)?;
            verify_section4(&s, &label, args.restarts, seed, tolerances)
        }
        Command::Bounds(args) => bounds_report(args, seed, tolerances),
        Command::Witness(args) => {
            let (s, label) = load_structure(&args.spec, &cli.global)?;
            let inner = gallery::witness_report(&s, &label)?;
            let mut report = VerificationReport::new(inner.command.clone(), seed, tolerances);
            report.absorb(inner);
            Ok(report)
        }
    }
}

fn load_structure(path: &Path, global: &GlobalArgs) -> Result<(StatStructure, String)> {
    let file = StructureSpecFile::from_path(path)?;
    let mut s = file.build()?;
    if let Some(raw) = &global.grid {
        s = s.with_grid(parse_grid(raw, s.dim())?)?;
    }
    Ok((s, path.display().to_string()))
}

/// `--grid` accepts one count for every axis ("7") or a per-axis list ("5,7,5").
fn parse_grid(raw: &str, n: usize) -> Result<Vec<usize>> {
    let counts = raw
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<usize>, _>>()
        .map_err(|_| Error::Precondition {
            message: format!("--grid expects positive integers, got \"{raw}\""),
        })?;
    if counts.len() == 1 {
        Ok(vec![counts[0]; n])
    } else {
        Ok(counts)
    }
}

fn chart_center(s: &StatStructure) -> Vec<f64> {
    s.chart()
        .bounds()
        .iter()
        .map(|&(lo, hi)| 0.5 * (lo + hi))
        .collect()
}

struct Extremes {
    lo: f64,
    hi: f64,
}

impl Extremes {
    fn new() -> Extremes {
        Extremes {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    fn take(&mut self, v: f64) {
        self.lo = self.lo.min(v);
        self.hi = self.hi.max(v);
    }
}

/// Eigenvalues of a bilinear form relative to the metric: the spectrum of
/// `L⁻¹·sym(T)·L⁻ᵀ` for `g = LLᵀ`.  The symmetrization matters for the
/// statistical Ricci tensor, which is only symmetric under conjugate
/// symmetry.
fn metric_eigenvalues(t: &TensorValue, g: &TensorValue) -> Result<Vec<f64>> {
    let n = t.dim();
    let gm = DMatrix::from_fn(n, n, |i, j| g.get(&[i, j]));
    let tm = DMatrix::from_fn(n, n, |i, j| 0.5 * (t.get(&[i, j]) + t.get(&[j, i])));
    let l = gm
        .cholesky()
        .ok_or_else(|| Error::Precondition {
            message: "metric lost positive definiteness".into(),
        })?
        .l();
    let linv = l.try_inverse().ok_or_else(|| Error::Precondition {
        message: "metric Cholesky factor is singular".into(),
    })?;
    let s = &linv * tm * linv.transpose();
    let s = 0.5 * (&s + s.transpose());
    Ok(s.symmetric_eigen().eigenvalues.iter().copied().collect())
}

fn describe(
    s: &StatStructure,
    label: &str,
    seed: u64,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(format!("describe {label}"), seed, tolerances);
    let points = s.chart().grid_points();
    let mut codazzi = 0.0f64;
    let mut trace_free = 0.0f64;
    let mut gap = 0.0f64;
    let mut asymmetry = 0.0f64;
    let mut skew = 0.0f64;
    let mut dual_consistency = 0.0f64;
    let mut pair_sum = 0.0f64;
    let mut ricci_sum = 0.0f64;
    let mut scalar_norm = 0.0f64;
    let mut dominance_min = f64::INFINITY;
    let mut scalar_stat = Extremes::new();
    let mut scalar_metric = Extremes::new();
    let mut ric_stat = Extremes::new();
    let mut ric_metric = Extremes::new();
    for p in &points {
        let sr = connection::structure_residuals(s, p)?;
        codazzi = codazzi.max(sr.codazzi);
        trace_free = trace_free.max(sr.trace_free);
        let cs = curvature::conjugate_symmetry_report(s, p)?;
        gap = gap.max(cs.curvature_gap);
        asymmetry = asymmetry.max(cs.derivative_asymmetry);
        skew = skew.max(cs.skew_defect);
        let ids = curvature::identity_residuals(s, p)?;
        pair_sum = pair_sum.max(ids.pair_sum);
        ricci_sum = ricci_sum.max(ids.ricci_sum);
        scalar_norm = scalar_norm.max(ids.scalar_norm);
        dominance_min = dominance_min.min(ids.ricci_dominance_gap);
        let bundle = curvature::curvature_bundle_at(s, p)?;
        dual_consistency = dual_consistency.max(bundle.dual_consistency);
        scalar_stat.take(bundle.scalar);
        scalar_metric.take(bundle.scalar_metric);
        let (g, _) = s.metric_at(p)?;
        for ev in metric_eigenvalues(&bundle.ric, &g)? {
            ric_stat.take(ev);
        }
        for ev in metric_eigenvalues(&bundle.ric_metric, &g)? {
            ric_metric.take(ev);
        }
    }
    report
        .residual("structure.codazzi_max", codazzi, tolerances.residual)
        .with_samples(points.len() as u64);
    report.residual("structure.trace_free_max", trace_free, tolerances.residual);
    report.residual(
        "curvature.dual_consistency_max",
        dual_consistency,
        tol::CROSS_CHECK,
    );
    // Conjugate symmetry is reported, not required: arbitrary spec
    // structures are allowed to lack it, so these rows stay informational.
    let conjugate_symmetric = gap.max(asymmetry).max(skew) <= tolerances.residual;
    report.value("conjugate_symmetry.curvature_gap_max", gap);
    report.value("conjugate_symmetry.derivative_asymmetry_max", asymmetry);
    report
        .value("conjugate_symmetry.skew_defect_max", skew)
        .with_detail(if conjugate_symmetric {
            "conjugate symmetric at the residual tolerance"
        } else {
            "not conjugate symmetric at the residual tolerance"
        });
    report.residual("identities.pair_sum_max", pair_sum, tolerances.residual);
    report.residual("identities.ricci_sum_max", ricci_sum, tolerances.residual);
    report.residual("identities.scalar_norm_max", scalar_norm, tolerances.residual);
    if conjugate_symmetric {
        report.slack(
            "identities.ricci_dominance_min",
            dominance_min,
            -tolerances.slack,
        );
    } else {
        report
            .value("identities.ricci_dominance_min", dominance_min)
            .with_detail("nonnegativity is only guaranteed under conjugate symmetry");
    }
    report.value("scalar.statistical.min", scalar_stat.lo);
    report.value("scalar.statistical.max", scalar_stat.hi);
    report.value("scalar.metric.min", scalar_metric.lo);
    report.value("scalar.metric.max", scalar_metric.hi);
    report.value("ricci.statistical.eig_min", ric_stat.lo);
    report.value("ricci.statistical.eig_max", ric_stat.hi);
    report.value("ricci.metric.eig_min", ric_metric.lo);
    report.value("ricci.metric.eig_max", ric_metric.hi);
    let (measured, sampled) = pinch::empirical_pinch(s, DESCRIBE_PLANES, seed)?;
    let (lo, hi) = measured.window();
    report
        .value("sectional.mean.min", lo)
        .with_samples(sampled);
    report.value("sectional.mean.max", hi);
    Ok(report)
}

fn verify_nomizu(
    args: &NomizuArgs,
    seed: u64,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    if args.samples == 0 {
        return Err(Error::Precondition {
            message: "the suite needs at least one sample".into(),
        });
    }
    let dims: Vec<usize> = match args.n {
        Some(n) => vec![n],
        None => (2..=5).collect(),
    };
    let command = match args.n {
        Some(n) => format!("verify nomizu --n {n} --samples {}", args.samples),
        None => format!("verify nomizu --samples {}", args.samples),
    };
    let mut report = VerificationReport::new(command, seed, tolerances);
    for &n in &dims {
        let metric = nomizu::identity_metric(n);
        // One dedicated stream per dimension, so adding a dimension to the
        // run never changes another dimension's draws.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let mut violations = 0u64;
        let mut min_slack = f64::INFINITY;
        for _ in 0..args.samples {
            let a = nomizu::random_trace_free_cubic(n, &mut rng);
            let gap = nomizu::nomizu_gap(&a, &metric)?;
            // With the identity metric the squared norm is the plain
            // component sum of squares.
            let psi: f64 = a.as_slice().iter().map(|v| v * v).sum();
            let normalized = gap / (1.0 + psi * psi);
            min_slack = min_slack.min(normalized);
            if normalized < -tolerances.slack {
                violations += 1;
            }
        }
        report
            .residual(format!("nomizu.n{n}.violations"), violations as f64, 0.0)
            .with_samples(args.samples);
        report.slack(format!("nomizu.n{n}.min_slack"), min_slack, -tolerances.slack);
    }
    Ok(report)
}

/// An `m`-per-axis lattice strictly inside the chart box, leaving one
/// lattice spacing of margin at both ends (finite differences need room).
fn interior_lattice(s: &StatStructure, per_axis: usize) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for &(lo, hi) in s.chart().bounds() {
        let step = (hi - lo) / (per_axis as f64 + 1.0);
        let mut next = Vec::with_capacity(points.len() * per_axis);
        for p in &points {
            for i in 1..=per_axis {
                let mut q = p.clone();
                q.push(lo + step * i as f64);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn verify_gallery(seed: u64, tolerances: Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("verify gallery", seed, tolerances);
    for family in gallery::families() {
        let name = family.name();
        let spec = FixtureSpec::new(name, family.default_dimension());
        let s = family.build(&spec)?;
        let points = s.chart().grid_points();
        let mut codazzi = 0.0f64;
        let mut trace_free = 0.0f64;
        let mut cs_max = 0.0f64;
        for p in &points {
            let sr = connection::structure_residuals(&s, p)?;
            codazzi = codazzi.max(sr.codazzi);
            trace_free = trace_free.max(sr.trace_free);
            let cs = curvature::conjugate_symmetry_report(&s, p)?;
            cs_max = cs_max
                .max(cs.curvature_gap)
                .max(cs.derivative_asymmetry)
                .max(cs.skew_defect);
        }
        report
            .residual(format!("{name}.codazzi_max"), codazzi, GALLERY_RESIDUAL)
            .with_samples(points.len() as u64);
        report.residual(format!("{name}.trace_free_max"), trace_free, GALLERY_RESIDUAL);
        report.residual(
            format!("{name}.conjugate_symmetry_max"),
            cs_max,
            tolerances.residual,
        );
        match name {
            "trivial" => {
                // The flat fixture must have *no* curvature of any flavor
                // and satisfy every algebraic identity to fixture precision.
                let mut curvature_max = 0.0f64;
                let mut identity_max = 0.0f64;
                for p in &points {
                    let bundle = curvature::curvature_bundle_at(&s, p)?;
                    curvature_max = curvature_max
                        .max(bundle.r.max_abs())
                        .max(bundle.r_dual.max_abs())
                        .max(bundle.r_metric.max_abs());
                    let ids = curvature::identity_residuals(&s, p)?;
                    identity_max = identity_max
                        .max(ids.pair_sum)
                        .max(ids.ricci_sum)
                        .max(ids.scalar_norm);
                }
                report.residual("trivial.curvature_max", curvature_max, GALLERY_RESIDUAL);
                report.residual("trivial.identity_max", identity_max, GALLERY_RESIDUAL);
            }
            "constant_distinct" | "linear_distinct" => {
                let mut witness_min = f64::INFINITY;
                let mut witness_max = 0.0f64;
                for p in &points {
                    let w = curvature::projective_witness_at(&s, p)?;
                    witness_min = witness_min.min(w.max_abs);
                    witness_max = witness_max.max(w.max_abs);
                }
                report
                    .slack(
                        format!("{name}.projective_witness_min"),
                        witness_min,
                        WITNESS_FLOOR,
                    )
                    .with_detail(if witness_min >= WITNESS_FLOOR {
                        "curvature obstruction present at every grid point"
                    } else {
                        "no obstruction at the witness floor"
                    });
                report.value(format!("{name}.projective_witness_max"), witness_max);
            }
            "hyperbolic_plane" => {
                // Calibration fixture: the sectional value is -1 everywhere,
                // through the symbolic path and the independent FD oracle.
                let plane = Plane::coordinate(0, 1, 2);
                let mut symbolic_gap = 0.0f64;
                for p in &points {
                    let k = curvature::sectional_curvature_at(&s, p, &plane)?;
                    symbolic_gap = symbolic_gap.max((k + 1.0).abs());
                }
                report.residual(
                    "hyperbolic_plane.sectional_gap",
                    symbolic_gap,
                    CALIBRATION_SYMBOLIC,
                );
                let mut fd_gap = 0.0f64;
                let interior = interior_lattice(&s, 3);
                for p in &interior {
                    let k = oracle::sectional_fd(&s, p, &plane, 1e-2, 1e-3)?;
                    fd_gap = fd_gap.max((k + 1.0).abs());
                }
                report
                    .residual("hyperbolic_plane.sectional_fd_gap", fd_gap, CALIBRATION_FD)
                    .with_samples(interior.len() as u64);
            }
            _ => {}
        }
    }
    Ok(report)
}

fn verify_section4(
    s: &StatStructure,
    label: &str,
    restarts: usize,
    seed: u64,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    let p = chart_center(s);
    let mut report =
        VerificationReport::new(format!("verify section4 {label}"), seed, tolerances);
    let best = optim::max_cubic_direction(s, &p, restarts, seed)?;
    report
        .value("section4.value", best.value)
        .with_samples(restarts as u64);
    if !best.converged {
        report.failure(
            "section4.converged",
            "the ascent did not reach its criticality tolerance",
        );
    }
    let checks = optim::maximizer_checks(s, &p, &best.v)?;
    report.residual(
        "section4.eigvec_residual",
        checks.eigvec_residual,
        tolerances.residual,
    );
    let min_gap = checks
        .lambda_gaps
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    report.slack("section4.min_lambda_gap", min_gap, -tolerances.residual);
    report.residual(
        "section4.identity_k",
        checks.identity_k_residual,
        tolerances.residual,
    );
    report.residual(
        "section4.identity_r",
        checks.identity_r_residual,
        tolerances.residual,
    );
    // The dense-grid oracle maximizes over the *Euclidean* unit sphere and
    // only supports n <= 3, so it applies exactly when the metric at the
    // evaluation point is the identity.
    let n = s.dim();
    let (g, _) = s.metric_at(&p)?;
    let euclidean = (0..n).all(|i| {
        (0..n).all(|j| {
            let expect = if i == j { 1.0 } else { 0.0 };
            (g.get(&[i, j]) - expect).abs() <= 1e-12
        })
    });
    if n <= 3 && euclidean {
        let a = s.cubic_at(&p)?;
        let (grid_value, _) = oracle::max_cubic_grid(&a, 48)?;
        report.residual(
            "section4.grid_oracle_gap",
            (best.value - grid_value).abs(),
            GRID_ORACLE,
        );
    }
    Ok(report)
}

fn bounds_report(args: &BoundsArgs, seed: u64, tolerances: Tolerances) -> Result<VerificationReport> {
    let (pinch, command) = match (args.h3, args.h1, args.h2) {
        (Some(h3), None, None) => {
            let eps = args.eps.unwrap_or(0.0);
            (
                CurvaturePinch::theorem(args.n, h3, eps)?,
                format!("bounds --n {} --h3 {h3} --eps {eps}", args.n),
            )
        }
        (None, Some(h1), Some(h2)) => {
            if args.eps.is_some() {
                return Err(Error::Precondition {
                    message: "--eps belongs to the --h3 parameterization".into(),
                });
            }
            (
                CurvaturePinch::from_bounds(args.n, h1, h2)?,
                format!("bounds --n {} --h1 {h1} --h2 {h2}", args.n),
            )
        }
        _ => {
            return Err(Error::Precondition {
                message: "give either --h3 (optionally with --eps) or both --h1 and --h2".into(),
            })
        }
    };
    let windows = pinch::bounds_windows(&pinch)?;
    let mut report = VerificationReport::new(command, seed, tolerances);
    report.value("pinch.h1", pinch.h1());
    report.value("pinch.h2", pinch.h2());
    report.value("pinch.h3", pinch.h3());
    report.value("pinch.eps", pinch.eps());
    report.value("ricci.lo", windows.ricci_lo);
    report.value("ricci.hi", windows.ricci_hi);
    report.value("scalar.lo", windows.scalar_lo);
    report.value("scalar.hi", windows.scalar_hi);
    let psi = roots::psi_sup_bound(pinch.n(), pinch.h3())?;
    report.value("psi.sup_bound", psi);
    let root = roots::largest_root(&roots::norm_root_instance(pinch.n(), pinch.h3()))?;
    report.residual("psi.root_consistency", (root - psi).abs(), ROOT_AGREEMENT);
    Ok(report)
}
