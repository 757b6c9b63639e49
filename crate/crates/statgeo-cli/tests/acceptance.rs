//! Acceptance suite: one test per end-to-end criterion, each ending in a
//! single `criterion NN (...): pass` line (run with `--nocapture` to see
//! them; a failed assertion names its criterion instead).
//!
//! Library-level checks go through `statgeo` directly; the two checks
//! about command-line behaviour spawn the built binary.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use statgeo::connection;
use statgeo::curvature::{self, Plane};
use statgeo::gallery::{self, FixtureSpec};
use statgeo::lab::laplace;
use statgeo::lab::nomizu;
use statgeo::lab::optim;
use statgeo::lab::pairing::crucial_sweep;
use statgeo::lab::pinch::{bounds_windows, empirical_pinch};
use statgeo::lab::roots;
use statgeo::oracle;
use statgeo::StatStructure;

fn pass(num: u32, what: &str, detail: String) {
    println!("criterion {num:02} ({what}): pass — {detail}");
}

fn center(s: &StatStructure) -> Vec<f64> {
    s.chart()
        .bounds()
        .iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect()
}

fn run_cli(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_statgeo"))
        .args(args)
        .output()
        .expect("binary must spawn");
    assert!(
        out.status.success(),
        "cli {:?} exited with {:?}: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report must be valid JSON")
}

fn check_value(report: &Value, name: &str) -> f64 {
    report["checks"]
        .as_array()
        .expect("report carries a checks array")
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("report has no check named {name}"))["value"]
        .as_f64()
        .expect("check value is a number")
}

/// Criterion 1: on the zero-cubic flat fixture every residual — Codazzi,
/// trace, the conjugate-symmetry triple, the pair/Ricci/scalar identity
/// residuals, and every curvature component — sits at rounding level
/// (≤ 1e−10) at all grid points, in under five seconds.
#[test]
fn criterion_01_trivial_fixture_residuals() {
    let started = Instant::now();
    let s = gallery::build(&FixtureSpec::new("trivial", 3)).unwrap();
    let points = s.chart().grid_points();
    let mut worst = 0.0f64;
    for p in &points {
        let sr = connection::structure_residuals(&s, p).unwrap();
        let cs = curvature::conjugate_symmetry_report(&s, p).unwrap();
        let ids = curvature::identity_residuals(&s, p).unwrap();
        let bundle = curvature::curvature_bundle_at(&s, p).unwrap();
        for r in [
            sr.codazzi,
            sr.trace_free,
            cs.curvature_gap,
            cs.derivative_asymmetry,
            cs.skew_defect,
            ids.pair_sum,
            ids.ricci_sum,
            ids.scalar_norm,
            bundle.r.max_abs(),
            bundle.r_dual.max_abs(),
            bundle.r_metric.max_abs(),
        ] {
            worst = worst.max(r);
        }
        assert!(
            worst <= 1e-10,
            "criterion 01: residual {worst:e} above 1e-10 at {p:?}"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "criterion 01: took {elapsed:?}, budget is 5 s"
    );
    pass(
        1,
        "trivial fixture residual sweep",
        format!(
            "max residual {worst:.2e} over {} grid points in {} ms",
            points.len(),
            elapsed.as_millis()
        ),
    );
}

/// Criterion 2: the half-plane fixture has sectional curvature −1 at 100
/// sampled points, within 1e−9 on the symbolic route and within 1e−5 via
/// the finite-difference oracle.
#[test]
fn criterion_02_hyperbolic_sectional_calibration() {
    let s = gallery::build(&FixtureSpec::new("hyperbolic_plane", 2)).unwrap();
    let plane = Plane::coordinate(0, 1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_symbolic = 0.0f64;
    let mut worst_fd = 0.0f64;
    for _ in 0..100 {
        // Margin keeps the outer+inner difference stencil inside the box.
        let p = vec![rng.gen_range(-0.9..0.9), rng.gen_range(1.1..2.9)];
        let symbolic = curvature::sectional_curvature_at(&s, &p, &plane).unwrap();
        worst_symbolic = worst_symbolic.max((symbolic + 1.0).abs());
        let fd = oracle::sectional_fd(&s, &p, &plane, 1e-2, 1e-3).unwrap();
        worst_fd = worst_fd.max((fd + 1.0).abs());
    }
    assert!(
        worst_symbolic <= 1e-9,
        "criterion 02: symbolic gap {worst_symbolic:e} above 1e-9"
    );
    assert!(
        worst_fd <= 1e-5,
        "criterion 02: finite-difference gap {worst_fd:e} above 1e-5"
    );
    pass(
        2,
        "half-plane curvature calibration",
        format!("symbolic gap {worst_symbolic:.2e}, finite-difference gap {worst_fd:.2e}"),
    );
}

/// Criterion 3: the constant-coefficient example in dimension 4 with
/// c = 1 hits its known curvature numbers — exact conjugate symmetry,
/// the distinct-index witness component −1, coordinate-plane sectional
/// −2, metric scalar 0 against statistical scalar −24, scalar identity
/// closed, and the Ricci comparison positive semidefinite.
#[test]
fn criterion_03_constant_example_landmarks() {
    let s = gallery::build(&FixtureSpec::new("constant_distinct", 4).with_c(1.0)).unwrap();
    let p = center(&s);

    let cs = curvature::conjugate_symmetry_report(&s, &p).unwrap();
    assert!(
        cs.curvature_gap <= 1e-12,
        "criterion 03: curvature gap {:e} above 1e-12",
        cs.curvature_gap
    );

    let witness = curvature::projective_witness_at(&s, &p).unwrap();
    let component = witness.components["1,2,3"];
    assert!(
        (component + 1.0).abs() <= 1e-12,
        "criterion 03: witness component {component} is not -1"
    );

    let k12 = curvature::sectional_curvature_at(&s, &p, &Plane::coordinate(0, 1, 4)).unwrap();
    assert!(
        (k12 + 2.0).abs() <= 1e-12,
        "criterion 03: coordinate-plane sectional {k12} is not -2"
    );

    let bundle = curvature::curvature_bundle_at(&s, &p).unwrap();
    assert!(
        bundle.scalar_metric.abs() <= 1e-9,
        "criterion 03: metric scalar {} is not 0",
        bundle.scalar_metric
    );
    assert!(
        (bundle.scalar + 24.0).abs() <= 1e-9,
        "criterion 03: statistical scalar {} is not -24",
        bundle.scalar
    );

    let ids = curvature::identity_residuals(&s, &p).unwrap();
    assert!(
        ids.scalar_norm <= 1e-9,
        "criterion 03: scalar identity residual {:e} above 1e-9",
        ids.scalar_norm
    );
    assert!(
        ids.ricci_dominance_gap >= -1e-9,
        "criterion 03: Ricci comparison min eigenvalue {:e} below -1e-9",
        ids.ricci_dominance_gap
    );

    pass(
        3,
        "constant example landmarks",
        format!(
            "witness {component}, sectional {k12}, scalars ({}, {}), dominance {:.2e}",
            bundle.scalar, bundle.scalar_metric, ids.ricci_dominance_gap
        ),
    );
}

/// Criterion 4: the spectral pairing bound survives 10⁵ random spectra for
/// every (n, floor, width) in {2,3,4,5} × {0, −0.5, −2} × {0, 0.3, 1} with
/// zero violations below the relative slack, all combinations inside 60 s.
#[test]
fn criterion_04_pairing_sweep_grid() {
    let started = Instant::now();
    let mut total: u64 = 0;
    let mut min_slack = f64::INFINITY;
    for n in [2usize, 3, 4, 5] {
        for h3 in [0.0, -0.5, -2.0] {
            for eps in [0.0, 0.3, 1.0] {
                let outcome = crucial_sweep(n, h3, eps, 100_000, 0).unwrap();
                assert_eq!(
                    outcome.violations, 0,
                    "criterion 04: {} violations at n={n}, H3={h3}, eps={eps}",
                    outcome.violations
                );
                total += outcome.samples;
                min_slack = min_slack.min(outcome.min_slack);
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 04: took {elapsed:?}, budget is 60 s"
    );
    pass(
        4,
        "pairing bound sweep",
        format!(
            "{total} samples, zero violations, min slack {min_slack:.3e}, {} ms",
            elapsed.as_millis()
        ),
    );
}

/// Criterion 5: the commutator-term lower bound holds on 10⁴ random
/// trace-free cubic forms per dimension 2…5, with gaps never dipping below
/// −1e−9·(1 + ψ²), inside 30 s.
#[test]
fn criterion_05_commutator_bound_suite() {
    let started = Instant::now();
    let mut worst_margin = f64::INFINITY;
    for n in 2usize..=5 {
        let g = nomizu::identity_metric(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        rng.set_stream(n as u64);
        for draw in 0..10_000 {
            let a = nomizu::random_trace_free_cubic(n, &mut rng);
            let gap = nomizu::nomizu_gap(&a, &g).unwrap();
            let psi: f64 = a.as_slice().iter().map(|v| v * v).sum();
            let floor = -1e-9 * (1.0 + psi * psi);
            assert!(
                gap >= floor,
                "criterion 05: gap {gap:e} below {floor:e} at n={n}, draw {draw}"
            );
            worst_margin = worst_margin.min(gap - floor);
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "criterion 05: took {elapsed:?}, budget is 30 s"
    );
    pass(
        5,
        "commutator bound suite",
        format!(
            "40000 draws, worst margin above floor {worst_margin:.3e}, {} ms",
            elapsed.as_millis()
        ),
    );
}

/// Criterion 6: the closed-form norm sup bound gives exactly 12 at
/// (n, H₃) = (3, −2), and the root-finder agrees with −n(n−1)H₃ to
/// 1e−12 on 20 random admissible pairs.
#[test]
fn criterion_06_root_bound_arithmetic() {
    assert_eq!(
        roots::psi_sup_bound(3, -2.0).unwrap(),
        12.0,
        "criterion 06: sup bound at (3, -2) must be exactly 12"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2usize..=9);
        let h3 = -rng.gen_range(0.0..5.0);
        let closed = roots::psi_sup_bound(n, h3).unwrap();
        let root = roots::largest_root(&roots::norm_root_instance(n, h3)).unwrap();
        let gap = (root - closed).abs();
        assert!(
            gap <= 1e-12,
            "criterion 06: root {root} vs closed form {closed} at n={n}, H3={h3}"
        );
        worst = worst.max(gap);
    }
    pass(
        6,
        "root-bound arithmetic",
        format!("exact value 12 reproduced; worst root disagreement {worst:.2e}"),
    );
}

/// Criterion 7: the `bounds` command reproduces the Ricci window [−3, 9]
/// and scalar window [−12, 0] for n=4, H₃=−1, ε=0, and the two input
/// parameterizations give identical windows to 1e−12.
#[test]
fn criterion_07_cli_bounds_windows() {
    let report = run_cli(&["bounds", "--n", "4", "--h3", "-1", "--eps", "0"]);
    for (name, expected) in [
        ("ricci.lo", -3.0),
        ("ricci.hi", 9.0),
        ("scalar.lo", -12.0),
        ("scalar.hi", 0.0),
        ("psi.sup_bound", 12.0),
    ] {
        let got = check_value(&report, name);
        assert!(
            (got - expected).abs() <= 1e-12,
            "criterion 07: {name} = {got}, expected {expected}"
        );
    }
    assert_eq!(report["passed"], Value::Bool(true), "criterion 07");

    // Same pinch stated as (H3, eps) and as raw (H1, H2): for n=5,
    // H3=-2, eps=0.6 the window endpoints are H1 = -0.5, H2 = -1.1.
    let via_floor = run_cli(&["bounds", "--n", "5", "--h3", "-2", "--eps", "0.6"]);
    let via_window = run_cli(&["bounds", "--n", "5", "--h1", "-0.5", "--h2", "-1.1"]);
    let mut worst = 0.0f64;
    for name in ["ricci.lo", "ricci.hi", "scalar.lo", "scalar.hi", "psi.sup_bound"] {
        let a = check_value(&via_floor, name);
        let b = check_value(&via_window, name);
        assert!(
            (a - b).abs() <= 1e-12,
            "criterion 07: {name} differs across parameterizations: {a} vs {b}"
        );
        worst = worst.max((a - b).abs());
    }
    pass(
        7,
        "bounds command windows",
        format!("[-3, 9] and [-12, 0] reproduced; reparameterization gap {worst:.2e}"),
    );
}

/// Criterion 8: for the constant example (n=4, c ∈ {0.5, 1, 2}) the
/// measured metric Ricci and scalar (both zero) land inside the windows
/// computed from the empirically sampled pinch, and the norm-Laplacian
/// comparison holds with nonnegative slack.
#[test]
fn criterion_08_window_membership_end_to_end() {
    for c in [0.5, 1.0, 2.0] {
        let s = gallery::build(&FixtureSpec::new("constant_distinct", 4).with_c(c)).unwrap();
        let p = center(&s);
        let (pinch, planes) = empirical_pinch(&s, 2_000, 8).unwrap();
        let windows = bounds_windows(&pinch).unwrap();

        let bundle = curvature::curvature_bundle_at(&s, &p).unwrap();
        assert!(
            bundle.ric_metric.max_abs() <= 1e-9 && bundle.scalar_metric.abs() <= 1e-9,
            "criterion 08: flat example should have zero metric curvature at c={c}"
        );
        assert!(
            windows.ricci_lo <= 0.0 && 0.0 <= windows.ricci_hi,
            "criterion 08: Ricci window [{}, {}] misses 0 at c={c}",
            windows.ricci_lo,
            windows.ricci_hi
        );
        assert!(
            windows.scalar_lo <= 0.0 && 0.0 <= windows.scalar_hi,
            "criterion 08: scalar window [{}, {}] misses 0 at c={c}",
            windows.scalar_lo,
            windows.scalar_hi
        );

        let dp = laplace::delta_psi_check(&s, &p, &pinch).unwrap();
        assert!(
            dp.slack >= 0.0,
            "criterion 08: norm-Laplacian slack {} negative at c={c} (lhs {}, rhs {})",
            dp.slack,
            dp.lhs,
            dp.rhs
        );
        if c == 1.0 {
            pass(
                8,
                "window membership end to end",
                format!(
                    "{planes} sampled planes, Ricci window [{:.3}, {:.3}], slack {:.3}",
                    windows.ricci_lo, windows.ricci_hi, dp.slack
                ),
            );
        }
    }
}

/// Criterion 9: sphere ascent on the constant example (n=3, c=1) finds
/// 2/√3, matching the dense-grid oracle within 1e−6, with eigenvector
/// residual and spectral gaps at rounding level; the two extremal-direction
/// identities hold to 1e−8 on 50 random constant-coefficient structures.
#[test]
fn criterion_09_extremal_direction_pipeline() {
    let s = gallery::build(&FixtureSpec::new("constant_distinct", 3).with_c(1.0)).unwrap();
    let p = center(&s);
    let md = optim::max_cubic_direction(&s, &p, 32, 9).unwrap();
    assert!(md.converged, "criterion 09: ascent did not converge");
    let target = 2.0 / 3.0f64.sqrt();
    assert!(
        (md.value - target).abs() <= 1e-6,
        "criterion 09: value {} is not 2/sqrt(3)",
        md.value
    );

    let a = s.cubic_at(&p).unwrap();
    let (grid_value, _) = oracle::max_cubic_grid(&a, 48).unwrap();
    assert!(
        (md.value - grid_value).abs() <= 1e-6,
        "criterion 09: ascent {} vs grid oracle {}",
        md.value,
        grid_value
    );

    let checks = optim::maximizer_checks(&s, &p, &md.v).unwrap();
    assert!(
        checks.eigvec_residual <= 1e-8,
        "criterion 09: eigenvector residual {:e}",
        checks.eigvec_residual
    );
    for (i, gap) in checks.lambda_gaps.iter().enumerate() {
        assert!(
            *gap >= -1e-8,
            "criterion 09: spectral gap {i} is {gap:e}"
        );
    }

    let mut worst_identity = 0.0f64;
    for seed in 0..50u64 {
        let n = 2 + (seed as usize % 4);
        let rs = gallery::random_trace_free_structure(n, seed).unwrap();
        let rp = center(&rs);
        let rmd = optim::max_cubic_direction(&rs, &rp, 16, seed).unwrap();
        assert!(rmd.converged, "criterion 09: seed {seed} did not converge");
        let rchecks = optim::maximizer_checks(&rs, &rp, &rmd.v).unwrap();
        worst_identity = worst_identity
            .max(rchecks.identity_k_residual)
            .max(rchecks.identity_r_residual);
        assert!(
            rchecks.identity_k_residual <= 1e-8 && rchecks.identity_r_residual <= 1e-8,
            "criterion 09: identity residuals ({:e}, {:e}) at seed {seed}, n={n}",
            rchecks.identity_k_residual,
            rchecks.identity_r_residual
        );
    }
    pass(
        9,
        "extremal-direction pipeline",
        format!(
            "value {:.9} vs oracle {grid_value:.9}; worst identity residual {worst_identity:.2e} over 50 structures",
            md.value
        ),
    );
}

/// Criterion 10: the three equivalent conjugate-symmetry residuals agree
/// on every verdict — all at rounding level on 20 symmetric fixtures, all
/// large on 20 perturbed ones, never split within a fixture.
#[test]
fn criterion_10_residual_coherence() {
    let mut mixed = 0u32;
    for seed in 0..20u64 {
        let n = 2 + (seed as usize % 4);
        let s = gallery::random_trace_free_structure(n, seed).unwrap();
        let p: Vec<f64> = (0..n).map(|i| 0.1 + 0.07 * i as f64).collect();
        let cs = curvature::conjugate_symmetry_report(&s, &p).unwrap();
        let three = [cs.curvature_gap, cs.derivative_asymmetry, cs.skew_defect];
        assert!(
            three.iter().all(|r| *r <= 1e-8),
            "criterion 10: symmetric fixture seed {seed} has residuals {three:?}"
        );
        if three.iter().any(|r| *r > 1e-8) {
            mixed += 1;
        }
    }
    for seed in 0..20u64 {
        let n = 3 + (seed as usize % 3);
        let s = gallery::perturbed_structure(n, seed).unwrap();
        let p: Vec<f64> = (0..n).map(|i| 0.3 - 0.09 * i as f64).collect();
        let cs = curvature::conjugate_symmetry_report(&s, &p).unwrap();
        let three = [cs.curvature_gap, cs.derivative_asymmetry, cs.skew_defect];
        assert!(
            three.iter().all(|r| *r >= 1e-4),
            "criterion 10: perturbed fixture seed {seed} has residuals {three:?}"
        );
        if three.iter().any(|r| *r < 1e-4) {
            mixed += 1;
        }
    }
    assert_eq!(mixed, 0, "criterion 10: {mixed} fixtures had split verdicts");
    pass(
        10,
        "residual coherence",
        "20 symmetric and 20 perturbed fixtures, no split verdicts".to_string(),
    );
}

/// Criterion 11: the product rule for the norm Laplacian —
/// Δ(g(A,A)) against 2g(ΔA,A) + 2‖∇̂A‖² — holds with relative error
/// ≤ 1e−4 at five interior points of the coordinate-linear example.
#[test]
fn criterion_11_norm_laplacian_product_rule() {
    let s = gallery::build(&FixtureSpec::new("linear_distinct", 4)).unwrap();
    let bounds = s.chart().bounds().to_vec();
    let mut worst = 0.0f64;
    for (pi, t) in [0.2, 0.35, 0.5, 0.65, 0.8].iter().enumerate() {
        let p: Vec<f64> = bounds
            .iter()
            .enumerate()
            .map(|(i, (lo, hi))| lo + (t + 0.03 * i as f64) * (hi - lo))
            .collect();
        let sc = laplace::simons_check(&s, &p).unwrap();
        assert!(
            sc.relative_gap <= 1e-4,
            "criterion 11: relative gap {:e} at point {pi} (lhs {}, rhs {})",
            sc.relative_gap,
            sc.lhs,
            sc.rhs
        );
        worst = worst.max(sc.relative_gap);
    }
    pass(
        11,
        "norm-Laplacian product rule",
        format!("worst relative gap {worst:.2e} over 5 interior points"),
    );
}

/// Criterion 12: the sweep command reports identical violation counts and
/// minimum slack for the same seed on different thread counts.
#[test]
fn criterion_12_thread_count_determinism() {
    let base = [
        "verify", "crucial", "--n", "4", "--h3", "-0.5", "--eps", "0.3", "--samples", "100000",
        "--seed", "42",
    ];
    let narrow = run_cli(&[&base[..], &["--threads", "1"]].concat());
    let wide = run_cli(&[&base[..], &["--threads", "4"]].concat());
    let v1 = check_value(&narrow, "crucial.violations");
    let v4 = check_value(&wide, "crucial.violations");
    let s1 = check_value(&narrow, "crucial.min_slack");
    let s4 = check_value(&wide, "crucial.min_slack");
    assert_eq!(v1, v4, "criterion 12: violation counts differ");
    assert_eq!(
        s1.to_bits(),
        s4.to_bits(),
        "criterion 12: min slack differs: {s1} vs {s4}"
    );
    pass(
        12,
        "thread-count determinism",
        format!("violations {v1}, min slack {s1} identical on 1 and 4 threads"),
    );
}
