//! The spectral pairing bound.
//!
//! For a unit vector `V` with `K_V`-eigenvalues `λ` and sectional values
//! `k_ij` of the eigenplanes, the pairing `⟨T′_V, A_V⟩` collapses to
//! `Σ_{i<j} (λ_j − λ_i)² k_ij − 2 Σ_{i<j} λ_i λ_j k_ij`, and stays at or
//! above `(n+1)·H₃·ψ_V` whenever every `k_ij` sits in the pinch window.
//! [`crucial_pair`] evaluates the closed form; [`crucial_sweep`] hammers
//! the bound with seeded random spectra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::lab::pinch::CurvaturePinch;
use crate::lab::standard_normal;
use crate::report::{Tolerances, VerificationReport};
use crate::Result;

/// Eigenvalues of `K_V` plus the sectional values of the eigenplanes.
///
/// `k` is stored packed over `i < j`, row-major; the diagonal is zero by
/// convention (a degenerate plane has no sectional value).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    lambda: Vec<f64>,
    k: Vec<f64>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl SpectrumSample {
    /// `lambda` must sum to zero (apolarity of the cubic form) and `k`
    /// must hold exactly the `n(n−1)/2` upper-triangle entries.
    pub fn new(lambda: Vec<f64>, k: Vec<f64>) -> Result<SpectrumSample> {
        let n = lambda.len();
        if n < 2 {
            return Err(Error::Precondition {
                message: "a spectrum sample needs n >= 2".into(),
            });
        }
        if k.len() != n * (n - 1) / 2 {
            return Err(Error::Precondition {
                message: format!(
                    "expected {} sectional entries for n = {n}, got {}",
                    n * (n - 1) / 2,
                    k.len()
                ),
            });
        }
        let sum: f64 = lambda.iter().sum();
        if sum.abs() > 1e-12 * (1.0 + lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            return Err(Error::Precondition {
                message: format!("eigenvalues must sum to zero (apolarity), got {sum:e}"),
            });
        }
        if lambda.iter().chain(k.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Precondition {
                message: "spectrum entries must be finite".into(),
            });
        }
        Ok(SpectrumSample { lambda, k })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Sectional value of the `(i, j)` eigenplane; zero on the diagonal.
    pub fn sectional(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.k[pair_index(self.dim(), a, b)]
    }

    /// Full symmetric matrix form, as the contraction oracle expects it.
    pub fn sectional_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                m[i][j] = self.sectional(i, j);
                m[j][i] = m[i][j];
            }
        }
        m
    }

    /// Whether every sectional entry lies in `[lo, hi]`.
    pub fn in_window(&self, lo: f64, hi: f64) -> bool {
        self.k.iter().all(|v| *v >= lo && *v <= hi)
    }
}

/// The closed form of the pairing and the squared spectrum norm
/// `ψ_V = Σ λᵢ²`.
pub fn crucial_pair(sample: &SpectrumSample) -> (f64, f64) {
    let n = sample.dim();
    let lambda = sample.lambda();
    let mut lhs = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = lambda[j] - lambda[i];
            lhs += (d * d - 2.0 * lambda[i] * lambda[j]) * sample.sectional(i, j);
        }
    }
    let psi = lambda.iter().map(|v| v * v).sum();
    (lhs, psi)
}

/// Outcome of a randomized sweep; merged associatively, so identical for
/// every thread count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOutcome {
    pub samples: u64,
    pub violations: u64,
    /// Smallest observed `lhs − (n+1)H₃ψ` (raw, not normalized).
    pub min_slack: f64,
}

/// Fixed task size for sweep partitioning.  Each chunk runs on its own
/// RNG stream, so the drawn samples — and therefore the outcome — depend
/// only on `(seed, chunk index)`, never on the number of worker threads.
const CHUNK: u64 = 4096;

/// Draw `samples` random spectra (`λ` standard normal recentered to sum
/// zero; `k` uniform in the pinch window) and check the pairing bound
/// `lhs ≥ (n+1)H₃ψ` on each.  A sample counts as a violation when its
/// slack drops below `−1e−9·(1 + |H₃|ψ)`.
pub fn crucial_sweep(
    n: usize,
    h3: f64,
    eps: f64,
    samples: u64,
    seed: u64,
) -> Result<SweepOutcome> {
    let pinch = CurvaturePinch::theorem(n, h3, eps)?;
    if samples == 0 {
        return Err(Error::Precondition {
            message: "a sweep needs at least one sample".into(),
        });
    }
    let (lo, hi) = pinch.window();
    let chunks = samples.div_ceil(CHUNK);
    let bound_factor = (n as f64 + 1.0) * h3;
    let outcome = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk + 1);
            let in_chunk = CHUNK.min(samples - chunk * CHUNK);
            let mut lambda = vec![0.0f64; n];
            let mut violations = 0u64;
            let mut min_slack = f64::INFINITY;
            for _ in 0..in_chunk {
                for l in lambda.iter_mut() {
                    *l = standard_normal(&mut rng);
                }
                let mean = lambda.iter().sum::<f64>() / n as f64;
                for l in lambda.iter_mut() {
                    *l -= mean;
                }
                let mut lhs = 0.0;
                let mut psi = 0.0;
                for (i, li) in lambda.iter().enumerate() {
                    psi += li * li;
                    for lj in &lambda[i + 1..] {
                        let k: f64 = rng.gen_range(lo..=hi);
                        let d = lj - li;
                        lhs += (d * d - 2.0 * li * lj) * k;
                    }
                }
                let slack = lhs - bound_factor * psi;
                min_slack = min_slack.min(slack);
                if slack < -1e-9 * (1.0 + h3.abs() * psi) {
                    violations += 1;
                }
            }
            (in_chunk, violations, min_slack)
        })
        .reduce(
            || (0, 0, f64::INFINITY),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2.min(b.2)),
        );
    Ok(SweepOutcome {
        samples: outcome.0,
        violations: outcome.1,
        min_slack: outcome.2,
    })
}

/// [`crucial_sweep`] wrapped as a report: fails iff any violation occurred.
pub fn crucial_report(
    n: usize,
    h3: f64,
    eps: f64,
    samples: u64,
    seed: u64,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    let outcome = crucial_sweep(n, h3, eps, samples, seed)?;
    let mut report = VerificationReport::new(
        format!("verify crucial --n {n} --h3 {h3} --eps {eps}"),
        seed,
        tolerances,
    );
    report
        .residual("crucial.violations", outcome.violations as f64, 0.0)
        .with_samples(outcome.samples);
    report.value("crucial.min_slack", outcome.min_slack);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pairing_contraction;

    #[test]
    fn two_dimensional_model_case() {
        let s = SpectrumSample::new(vec![1.0, -1.0], vec![-1.0]).unwrap();
        let (lhs, psi) = crucial_pair(&s);
        assert_eq!(lhs, -6.0);
        assert_eq!(psi, 2.0);
        // Equality with (n+1)·H3·psi at H3 = −1.
        assert_eq!(lhs - 3.0 * (-1.0) * psi, 0.0);
    }

    #[test]
    fn zero_spectrum_gives_zero_pairing() {
        let s = SpectrumSample::new(vec![0.0; 3], vec![0.4, -0.3, 0.9]).unwrap();
        assert_eq!(crucial_pair(&s), (0.0, 0.0));
    }

    #[test]
    fn closed_form_matches_raw_contraction_on_a_symmetric_spectrum() {
        let c = 0.37;
        let s = SpectrumSample::new(vec![1.0, 1.0, -2.0], vec![c; 3]).unwrap();
        let (lhs, _) = crucial_pair(&s);
        assert!((lhs - 24.0 * c).abs() < 1e-14, "closed form {lhs}");
        let oracle = pairing_contraction(s.lambda(), &s.sectional_matrix());
        assert!((lhs - oracle).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_raw_contraction_on_random_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..10_000 {
            let n = 2 + (trial % 4);
            let mut lambda: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
            let mean = lambda.iter().sum::<f64>() / n as f64;
            lambda.iter_mut().for_each(|l| *l -= mean);
            let k: Vec<f64> = (0..n * (n - 1) / 2)
                .map(|_| rng.gen_range(-2.0..2.0))
                .collect();
            let s = SpectrumSample::new(lambda, k).unwrap();
            let (lhs, _) = crucial_pair(&s);
            let oracle = pairing_contraction(s.lambda(), &s.sectional_matrix());
            assert!(
                (lhs - oracle).abs() <= 1e-10 * (1.0 + lhs.abs()),
                "trial {trial}: closed {lhs} raw {oracle}"
            );
        }
    }

    #[test]
    fn sweep_finds_no_violations_inside_the_window() {
        let out = crucial_sweep(4, -1.0, 0.5, 20_000, 7).unwrap();
        assert_eq!(out.samples, 20_000);
        assert_eq!(out.violations, 0, "min slack {}", out.min_slack);
        assert!(out.min_slack > -1e-9);
    }

    #[test]
    fn degenerate_window_pins_the_slack_to_zero() {
        // eps = 0 forces every k to H3 and the bound becomes an identity:
        // the only slack left is the squared residual of the recentered
        // eigenvalue sum, which is nonnegative for H3 ≤ 0.
        let out = crucial_sweep(3, -2.0, 0.0, 10_000, 11).unwrap();
        assert_eq!(out.violations, 0);
        assert!(out.min_slack.abs() < 1e-12, "min slack {}", out.min_slack);
    }

    #[test]
    fn nonnegative_window_keeps_the_pairing_nonnegative() {
        // H3 = 0: the right-hand side vanishes and every k_ij ≥ 0, so the
        // pairing itself must stay nonnegative.
        let out = crucial_sweep(2, 0.0, 1.0, 5_000, 3).unwrap();
        assert_eq!(out.violations, 0);
        assert!(out.min_slack >= 0.0);
    }

    #[test]
    fn sweeps_are_reproducible() {
        let a = crucial_sweep(5, -0.5, 0.3, 12_345, 99).unwrap();
        let b = crucial_sweep(5, -0.5, 0.3, 12_345, 99).unwrap();
        assert_eq!(a, b);
        let c = crucial_sweep(5, -0.5, 0.3, 12_345, 100).unwrap();
        assert!(a.min_slack != c.min_slack);
    }

    #[test]
    fn sample_validation() {
        assert!(SpectrumSample::new(vec![1.0], vec![]).is_err());
        assert!(SpectrumSample::new(vec![1.0, -0.5], vec![0.0]).is_err());
        assert!(SpectrumSample::new(vec![1.0, -1.0], vec![0.0, 0.0]).is_err());
        assert!(SpectrumSample::new(vec![1.0, -1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn sweep_rejects_bad_pinches() {
        assert!(crucial_sweep(4, 0.5, 0.0, 10, 0).is_err());
        assert!(crucial_sweep(4, -1.0, -0.2, 10, 0).is_err());
        assert!(crucial_sweep(4, -1.0, 0.2, 0, 0).is_err());
    }
}
