//! Homodyne outcome statistics for squeezed coherent probes.
//!
//! A homodyne measurement along the quadrature at angle `psi`, performed with
//! detector efficiency `eta`, sees a Gaussian outcome distribution. For a
//! probe `(a, phi, r, theta)` the mean and squared width (in the crate's
//! exponent convention) are
//!
//! ```text
//! x0       = a cos(psi - phi)
//! width_sq = e^{-2r} cos^2(psi - theta/2) + e^{2r} sin^2(psi - theta/2)
//!            + (1 - eta)/(4 eta)
//! ```
//!
//! Detector loss enters purely as the additive width term: the lossy
//! distribution is the ideal one convolved with a Gaussian of squared width
//! `(1 - eta)/(4 eta)`, which leaves the mean untouched.

use crate::gauss::GaussianPdf;
use crate::states::SqueezedCoherentState;
use crate::{Error, Result};

/// Measured quadrature angle plus detector efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneSetup {
    /// Quadrature angle `psi` in radians.
    pub psi: f64,
    /// Detector efficiency `eta` in `(0, 1]`.
    pub eta: f64,
}

impl HomodyneSetup {
    /// `eta = 0` is rejected outright: the added noise `(1 - eta)/(4 eta)`
    /// diverges there and the outcome distribution is undefined.
    pub fn new(psi: f64, eta: f64) -> Result<Self> {
        if !psi.is_finite() {
            return Err(Error::InvalidParameter("psi must be finite".into()));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "detector efficiency must lie in (0, 1], got {eta}"
            )));
        }
        Ok(Self { psi, eta })
    }

    /// Squared width of the loss-induced convolution kernel.
    pub fn noise_width_sq(&self) -> f64 {
        (1.0 - self.eta) / (4.0 * self.eta)
    }
}

/// Outcome distribution of a lossy homodyne measurement on a squeezed
/// coherent probe.
pub fn outcome_pdf(s: &SqueezedCoherentState, m: &HomodyneSetup) -> GaussianPdf {
    let x0 = s.a * (m.psi - s.phi).cos();
    let u = m.psi - 0.5 * s.theta;
    let (sin_u, cos_u) = u.sin_cos();
    let width_sq =
        (-2.0 * s.r).exp() * cos_u * cos_u + (2.0 * s.r).exp() * sin_u * sin_u + m.noise_width_sq();
    GaussianPdf { x0, width_sq }
}

/// Map an ideal (unit-efficiency) squared width to its lossy counterpart:
/// convolving with the detector noise adds `(1 - eta)/(4 eta)`.
pub fn loss_convolution_width(width_sq_ideal: f64, eta: f64) -> f64 {
    assert!(width_sq_ideal > 0.0, "ideal width must be positive");
    assert!(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
    width_sq_ideal + (1.0 - eta) / (4.0 * eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rejects_out_of_range_efficiency() {
        assert!(HomodyneSetup::new(0.0, 0.0).is_err());
        assert!(HomodyneSetup::new(0.0, -0.2).is_err());
        assert!(HomodyneSetup::new(0.0, 1.2).is_err());
        assert!(HomodyneSetup::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn outcome_pdf_direct_substitutions() {
        let ideal = HomodyneSetup::new(0.0, 1.0).unwrap();
        let vac = outcome_pdf(&SqueezedCoherentState::vacuum(), &ideal);
        assert!((vac.x0 - 0.0).abs() < 1e-15);
        assert!((vac.width_sq - 1.0).abs() < 1e-15);

        let coherent = SqueezedCoherentState::coherent(2.0, 0.0).unwrap();
        let p = outcome_pdf(&coherent, &ideal);
        assert!((p.x0 - 2.0).abs() < 1e-15);
        assert!((p.width_sq - 1.0).abs() < 1e-15);

        let lossy = HomodyneSetup::new(0.0, 0.9).unwrap();
        let v = outcome_pdf(&SqueezedCoherentState::vacuum(), &lossy);
        assert!((v.x0 - 0.0).abs() < 1e-15);
        assert!((v.width_sq - (1.0 + 1.0 / 36.0)).abs() < 1e-15);
    }

    #[test]
    fn loss_convolution_examples() {
        assert_eq!(loss_convolution_width(1.7, 1.0), 1.7);
        assert!((loss_convolution_width(1.0, 0.5) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn lossy_pdf_is_convolved_ideal_pdf() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let s = SqueezedCoherentState::new(
                rng.random_range(0.0..2.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(0.0..1.2),
                rng.random_range(-3.0..3.0),
            )
            .unwrap();
            let psi = rng.random_range(-3.0..3.0);
            let eta = rng.random_range(0.05..1.0);
            let lossy = outcome_pdf(&s, &HomodyneSetup::new(psi, eta).unwrap());
            let ideal = outcome_pdf(&s, &HomodyneSetup::new(psi, 1.0).unwrap());
            assert!((lossy.x0 - ideal.x0).abs() < 1e-15, "loss keeps the mean");
            let conv = loss_convolution_width(ideal.width_sq, eta);
            assert!((lossy.width_sq - conv).abs() < 1e-12);
        }
    }

    #[test]
    fn pdf_depends_only_on_phase_differences() {
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..50 {
            let a = rng.random_range(0.0..2.0);
            let phi = rng.random_range(-3.0..3.0);
            let r = rng.random_range(0.0..1.5);
            let theta = rng.random_range(-3.0..3.0);
            let psi = rng.random_range(-3.0..3.0);
            let eta = rng.random_range(0.2..1.0);
            let shift = rng.random_range(-2.0..2.0);

            let base = outcome_pdf(
                &SqueezedCoherentState::new(a, phi, r, theta).unwrap(),
                &HomodyneSetup::new(psi, eta).unwrap(),
            );
            // Shift phi and psi together, and theta twice as fast.
            let moved = outcome_pdf(
                &SqueezedCoherentState::new(a, phi + shift, r, theta + 2.0 * shift).unwrap(),
                &HomodyneSetup::new(psi + shift, eta).unwrap(),
            );
            assert!((base.x0 - moved.x0).abs() < 1e-14);
            assert!((base.width_sq - moved.width_sq).abs() < 1e-13);
        }
    }

    #[test]
    fn coherent_width_is_angle_independent() {
        let s = SqueezedCoherentState::coherent(1.4, 0.6).unwrap();
        for i in 0..12 {
            let psi = -3.0 + i as f64 * 0.5;
            let p = outcome_pdf(&s, &HomodyneSetup::new(psi, 0.8).unwrap());
            assert!((p.width_sq - (1.0 + 0.2 / 3.2)).abs() < 1e-14);
        }
    }

    #[test]
    fn width_lower_bound() {
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..200 {
            let r = rng.random_range(0.0..2.0);
            let s = SqueezedCoherentState::new(
                rng.random_range(0.0..2.0),
                rng.random_range(-3.0..3.0),
                r,
                rng.random_range(-3.0..3.0),
            )
            .unwrap();
            let eta = rng.random_range(0.05..1.0);
            let m = HomodyneSetup::new(rng.random_range(-3.0..3.0), eta).unwrap();
            let p = outcome_pdf(&s, &m);
            let floor = m.noise_width_sq() + (-2.0 * r).exp().min((2.0 * r).exp());
            assert!(p.width_sq >= floor - 1e-12);
            assert!(p.width_sq > 0.0);
        }
    }
}
