//! Cross-module properties: randomized checks that tie the expression
//! language, the curvature pipeline, the fixtures, and the sweeps together.
//! Everything here goes through public API only.

use proptest::prelude::*;

use statgeo::curvature::{self, Plane};
use statgeo::expr::{self, Expr, Func};
use statgeo::gallery::{self, FixtureSpec};
use statgeo::lab::pairing::crucial_sweep;
use statgeo::lab::pinch::empirical_pinch;
use statgeo::specfile::StructureSpecFile;

const DIM: usize = 3;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-2.0f64..2.0).prop_map(Expr::constant),
        (0usize..DIM).prop_map(Expr::coord),
    ]
}

/// Full expression language, with denominators bounded away from zero and
/// only small integer exponents; the analytic calls stay in the bounded
/// family so nothing overflows at depth.
fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::div(
                    a,
                    Expr::add(Expr::constant(2.0), Expr::mul(b.clone(), b))
                )),
            (inner.clone(), 2u32..4u32)
                .prop_map(|(a, k)| Expr::pow(a, Expr::constant(f64::from(k)))),
            (
                inner,
                prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Tanh)]
            )
                .prop_map(|(a, f)| Expr::call(f, a)),
        ]
    })
}

/// Rational subset (no analytic calls): third derivatives stay polynomial
/// in the coefficients, which keeps the finite-difference error model tame.
fn rational_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::div(
                    a,
                    Expr::add(Expr::constant(2.0), Expr::mul(b.clone(), b))
                )),
            (inner, 2u32..4u32).prop_map(|(a, k)| Expr::pow(a, Expr::constant(f64::from(k)))),
        ]
    })
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.8f64..0.8, DIM)
}

proptest! {
    /// Rendering an expression and parsing it back never changes its value:
    /// float literals print round-trip exact, and the parser's constant
    /// folding performs the same f64 arithmetic `eval` would.
    #[test]
    fn display_parse_round_trip(e in any_expr(), p in point()) {
        let direct = e.eval(&p);
        let reparsed = expr::parse(&e.to_string(), DIM)
            .expect("printed expression must re-parse")
            .eval(&p);
        match (direct, reparsed) {
            (Ok(a), Ok(b)) => {
                prop_assume!(a.is_finite());
                prop_assert!(
                    (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                    "direct {a} vs reparsed {b} for `{e}`"
                );
            }
            // Domain failures (log of a negative, say) must at least agree.
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one route failed: {a:?} vs {b:?} for `{e}`"),
        }
    }

    /// The symbolic derivative matches a central difference on the rational
    /// fragment of the language.
    #[test]
    fn symbolic_derivative_matches_central_difference(
        e in rational_expr(),
        p in point(),
        axis in 0usize..DIM,
    ) {
        let h = 1e-5;
        let mut hi = p.clone();
        let mut lo = p.clone();
        hi[axis] += h;
        lo[axis] -= h;
        let (Ok(fp), Ok(fm)) = (e.eval(&hi), e.eval(&lo)) else {
            return Err(TestCaseError::reject("eval failed off-center"));
        };
        let Ok(sym) = e.differentiate(axis).eval(&p) else {
            return Err(TestCaseError::reject("derivative eval failed"));
        };
        let fd = (fp - fm) / (2.0 * h);
        prop_assume!(fd.is_finite() && sym.is_finite());
        prop_assume!(fd.abs().max(sym.abs()) <= 1e5 && fp.abs().max(fm.abs()) <= 1e5);
        prop_assert!(
            (fd - sym).abs() <= 1e-4 * (1.0 + fd.abs().max(sym.abs())),
            "fd {fd} vs symbolic {sym} for `{e}` along axis {axis}"
        );
    }

    /// The sectional value depends on the plane, not on the basis chosen
    /// for it: any invertible recombination of the spanning pair gives the
    /// same number.
    #[test]
    fn sectional_value_is_basis_invariant(
        u in prop::collection::vec(-1.0f64..1.0, DIM),
        v in prop::collection::vec(-1.0f64..1.0, DIM),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        c in -2.0f64..2.0,
        d in -2.0f64..2.0,
    ) {
        prop_assume!((a * d - b * c).abs() >= 0.2);
        let s = gallery::build(&FixtureSpec::new("constant_distinct", DIM).with_c(1.0)).unwrap();
        let p = vec![0.0; DIM];
        let original = Plane::new(u.clone(), v.clone());
        let recombined = Plane::new(
            (0..DIM).map(|i| a * u[i] + b * v[i]).collect(),
            (0..DIM).map(|i| c * u[i] + d * v[i]).collect(),
        );
        let Ok(k1) = curvature::sectional_curvature_at(&s, &p, &original) else {
            return Err(TestCaseError::reject("degenerate spanning pair"));
        };
        let k2 = curvature::sectional_curvature_at(&s, &p, &recombined).unwrap();
        prop_assert!(
            (k1 - k2).abs() <= 1e-9 * (1.0 + k1.abs()),
            "sectional {k1} vs recombined {k2}"
        );
    }
}

/// Rescaling the cubic form by `alpha` on a flat-metric constant-component
/// structure rescales the whole curvature tensor by `alpha^2` (the metric
/// part vanishes and what is left is quadratic in the difference tensor),
/// and it preserves conjugate symmetry exactly.
#[test]
fn alpha_transform_scales_curvature_quadratically() {
    for seed in 0..10u64 {
        let s = gallery::random_trace_free_structure(3, seed).unwrap();
        let p = vec![0.1, -0.2, 0.3];
        let base = curvature::curvature_bundle_at(&s, &p).unwrap();
        for alpha in [0.5, 1.5, 2.0] {
            let scaled = gallery::alpha_transform(&s, alpha);
            let bundle = curvature::curvature_bundle_at(&scaled, &p).unwrap();
            let factor = alpha * alpha;
            let mut worst = 0.0f64;
            for (idx_flat, v) in bundle.r.as_slice().iter().enumerate() {
                let expected = factor * base.r.as_slice()[idx_flat];
                worst = worst.max((v - expected).abs());
            }
            assert!(
                worst <= 1e-10 * (1.0 + factor * base.r.max_abs()),
                "seed {seed} alpha {alpha}: curvature deviates by {worst}"
            );
            let cs = curvature::conjugate_symmetry_report(&scaled, &p).unwrap();
            assert!(cs.curvature_gap <= 1e-10, "gap {}", cs.curvature_gap);
            assert!(cs.derivative_asymmetry <= 1e-10);
            assert!(cs.skew_defect <= 1e-10);
        }
    }
}

/// The sweep outcome is a pure function of `(n, H3, eps, samples, seed)`:
/// running it on pools of different widths changes nothing, down to the
/// last bit of the minimum slack.
#[test]
fn sweep_outcome_is_thread_count_independent() {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| crucial_sweep(4, -0.5, 0.3, 20_000, 1234).unwrap())
    };
    let narrow = run(1);
    let wide = run(4);
    assert_eq!(narrow.samples, wide.samples);
    assert_eq!(narrow.violations, wide.violations);
    assert_eq!(narrow.min_slack.to_bits(), wide.min_slack.to_bits());
}

/// Same for the sampled pinch: per-point RNG streams make the measured
/// window independent of the pool that evaluated it.
#[test]
fn empirical_pinch_is_thread_count_independent() {
    let s = gallery::build(&FixtureSpec::new("constant_distinct", 4)).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| empirical_pinch(&s, 100, 7).unwrap())
    };
    let (narrow, n_count) = run(1);
    let (wide, w_count) = run(4);
    assert_eq!(n_count, w_count);
    assert_eq!(narrow.h1().to_bits(), wide.h1().to_bits());
    assert_eq!(narrow.h2().to_bits(), wide.h2().to_bits());
}

/// A fixture requested through a spec file is the same structure the
/// gallery hands out directly.
#[test]
fn spec_file_fixture_matches_gallery_build() {
    let file = StructureSpecFile::from_str(
        r#"{"dimension": 4, "fixture": {"name": "constant_distinct", "params": {"c": 1.0}}}"#,
    )
    .unwrap();
    let from_file = file.build().unwrap();
    let direct = gallery::build(&FixtureSpec::new("constant_distinct", 4).with_c(1.0)).unwrap();
    let p = vec![0.25, -0.5, 0.0, 0.75];
    let a = curvature::curvature_bundle_at(&from_file, &p).unwrap();
    let b = curvature::curvature_bundle_at(&direct, &p).unwrap();
    assert_eq!(a.r.max_abs_diff(&b.r), 0.0);
    assert_eq!(a.scalar, b.scalar);
    let wa = curvature::projective_witness_at(&from_file, &p).unwrap();
    let wb = curvature::projective_witness_at(&direct, &p).unwrap();
    assert_eq!(wa.max_abs, wb.max_abs);
}
