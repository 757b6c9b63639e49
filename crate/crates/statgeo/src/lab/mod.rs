//! The inequality laboratory.
//!
//! Randomized and closed-form verification of the curvature inequalities:
//! the spectral pairing bound ([`pairing`]), the commutator-term lower
//! bound ([`nomizu`]), the norm Laplacian machinery ([`laplace`]), the
//! root-bound arithmetic behind the sup estimates ([`roots`]), the pinch
//! windows ([`pinch`]), and the sphere maximization pipeline ([`optim`]).

pub mod laplace;
pub mod nomizu;
pub mod optim;
pub mod pairing;
pub mod pinch;
pub mod roots;

/// One standard-normal draw via Box–Muller.
///
/// Kept local (instead of pulling a distributions crate) so that the exact
/// draw order per sample — and with it the determinism contract of every
/// sweep — is visible in this repository.
pub(crate) fn standard_normal(rng: &mut impl rand::Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            let v: f64 = rng.gen();
            return (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos();
        }
    }
}
