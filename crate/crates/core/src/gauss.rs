//! Optimal binary discrimination of one-dimensional Gaussian outcome
//! distributions.
//!
//! Densities follow the exponent convention used throughout the crate,
//!
//! ```text
//! pdf(x) = (pi * width_sq)^(-1/2) * exp(-(x - x0)^2 / width_sq)
//! ```
//!
//! so `width_sq` is twice the usual variance. The maximum-likelihood decision
//! rule between two such densities has a quadratic log-likelihood difference,
//! hence at most two thresholds; error probabilities close in terms of `erf`.
//! For error probabilities far below 1e-15 everything is evaluated through
//! `erfc` so the tails keep full relative precision.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Error function `erf(x) = 2/sqrt(pi) * integral_0^x exp(-t^2) dt`.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`, accurate deep into the tail.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// A normalized Gaussian density in the crate's exponent convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPdf {
    /// Outcome mean.
    pub x0: f64,
    /// Squared width `sigma^2` appearing in the exponent (twice the variance).
    pub width_sq: f64,
}

impl GaussianPdf {
    pub fn new(x0: f64, width_sq: f64) -> Result<Self> {
        if !x0.is_finite() || !width_sq.is_finite() || width_sq <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Gaussian pdf needs finite x0 and width_sq > 0, got x0 = {x0}, width_sq = {width_sq}"
            )));
        }
        Ok(Self { x0, width_sq })
    }

    /// Density value at `x`.
    pub fn pdf(&self, x: f64) -> f64 {
        let z = x - self.x0;
        (-(z * z) / self.width_sq).exp() / (PI * self.width_sq).sqrt()
    }

    /// Width `sigma` (square root of `width_sq`).
    pub fn sigma(&self) -> f64 {
        self.width_sq.sqrt()
    }

    /// Probability mass on `[a, b]`; either end may be infinite.
    ///
    /// Evaluated in whichever `erf`/`erfc` branch avoids cancellation, so tail
    /// masses far below 1e-15 come out with full relative precision.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a <= b);
        let s = self.sigma();
        let za = (a - self.x0) / s;
        let zb = (b - self.x0) / s;
        if za >= 0.0 {
            0.5 * (erfc(za) - erfc(zb))
        } else if zb <= 0.0 {
            0.5 * (erfc(-zb) - erfc(-za))
        } else {
            0.5 * (erf(zb) - erf(za))
        }
    }
}

/// A threshold decision rule over the real line.
///
/// Labels alternate across the sorted thresholds, starting from `first_label`
/// on the leftmost interval. Rules produced by [`mle_rule`] have 0, 1 or 2
/// thresholds; points sitting exactly on a threshold are labeled 0 (ties in
/// the likelihood ratio go to hypothesis 0).
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRule {
    thresholds: Vec<f64>,
    first_label: u8,
    degenerate: bool,
}

impl DecisionRule {
    pub fn new(thresholds: Vec<f64>, first_label: u8) -> Result<Self> {
        if first_label > 1 {
            return Err(Error::InvalidParameter(format!(
                "labels are bits, got first_label = {first_label}"
            )));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) || thresholds.iter().any(|t| !t.is_finite())
        {
            return Err(Error::InvalidParameter(
                "thresholds must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self {
            thresholds,
            first_label,
            degenerate: false,
        })
    }

    fn constant(label: u8) -> Self {
        Self {
            thresholds: Vec::new(),
            first_label: label,
            degenerate: true,
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn first_label(&self) -> u8 {
        self.first_label
    }

    /// True when the rule assigns the same label everywhere.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Label assigned to outcome `x`.
    pub fn label(&self, x: f64) -> u8 {
        if self.thresholds.contains(&x) {
            return 0;
        }
        let crossed = self.thresholds.iter().filter(|&&t| x > t).count();
        self.first_label ^ (crossed as u8 & 1)
    }

    /// Intervals of the partition together with their labels.
    fn intervals(&self) -> Vec<(f64, f64, u8)> {
        let mut edges = Vec::with_capacity(self.thresholds.len() + 2);
        edges.push(f64::NEG_INFINITY);
        edges.extend_from_slice(&self.thresholds);
        edges.push(f64::INFINITY);
        edges
            .windows(2)
            .enumerate()
            .map(|(i, w)| (w[0], w[1], self.first_label ^ (i as u8 & 1)))
            .collect()
    }
}

/// Maximum-likelihood (prior-weighted) decision rule between two Gaussians.
///
/// Assigns label 0 exactly where `prior0 * p0(x) >= (1 - prior0) * p1(x)`.
/// The thresholds are the real roots of the quadratic log-likelihood
/// difference, computed with the numerically stable root formula; widths that
/// agree to better than 1e-12 fall back to the single-threshold equal-width
/// branch, where the quadratic coefficient would be pure cancellation noise.
pub fn mle_rule(p0: &GaussianPdf, p1: &GaussianPdf, prior0: f64) -> Result<DecisionRule> {
    if !(prior0 > 0.0 && prior0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "prior0 must lie strictly between 0 and 1, got {prior0}"
        )));
    }
    let (m0, w0) = (p0.x0, p0.width_sq);
    let (m1, w1) = (p1.x0, p1.width_sq);
    // Log-likelihood difference f(x) = ln[prior0 p0(x)] - ln[prior1 p1(x)]
    //                               = a x^2 + b x + c; label 0 iff f(x) >= 0.
    let prior_term = (prior0 / (1.0 - prior0)).ln() + 0.5 * (w1 / w0).ln();

    if (w0 - w1).abs() < 1e-12 {
        // Equal widths: f is affine.
        let w = 0.5 * (w0 + w1);
        let slope = 2.0 * (m0 - m1) / w;
        let offset = prior_term + (m1 * m1 - m0 * m0) / w;
        if slope == 0.0 {
            // Identical means: f is constant; ties go to label 0.
            return Ok(DecisionRule::constant(if offset >= 0.0 { 0 } else { 1 }));
        }
        let t = -offset / slope;
        // Left of the threshold f has the sign of -slope.
        let first = if slope < 0.0 { 0 } else { 1 };
        return Ok(DecisionRule {
            thresholds: vec![t],
            first_label: first,
            degenerate: false,
        });
    }

    let a = 1.0 / w1 - 1.0 / w0;
    let b = 2.0 * (m0 / w0 - m1 / w1);
    let c = prior_term + m1 * m1 / w1 - m0 * m0 / w0;
    let disc = b * b - 4.0 * a * c;
    if disc <= 0.0 {
        // No sign change: the parabola keeps the sign of its leading term.
        return Ok(DecisionRule::constant(if a > 0.0 { 0 } else { 1 }));
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let q = if q == 0.0 { -0.5 * sq } else { q };
    let (r0, r1) = (q / a, c / q);
    let (lo, hi) = if r0 <= r1 { (r0, r1) } else { (r1, r0) };
    if lo == hi {
        return Ok(DecisionRule::constant(if a > 0.0 { 0 } else { 1 }));
    }
    Ok(DecisionRule {
        thresholds: vec![lo, hi],
        first_label: if a > 0.0 { 0 } else { 1 },
        degenerate: false,
    })
}

/// Error probability of a decision rule between two Gaussian hypotheses:
/// `prior0 * P(label 1 | H0) + (1 - prior0) * P(label 0 | H1)`, in closed form
/// as a sum of `erf`/`erfc` terms over the rule's intervals.
pub fn error_probability(
    p0: &GaussianPdf,
    p1: &GaussianPdf,
    prior0: f64,
    rule: &DecisionRule,
) -> f64 {
    let mut wrong0 = 0.0; // P(label 1 | hypothesis 0)
    let mut wrong1 = 0.0; // P(label 0 | hypothesis 1)
    for (a, b, label) in rule.intervals() {
        if label == 1 {
            wrong0 += p0.mass(a, b);
        } else {
            wrong1 += p1.mass(a, b);
        }
    }
    prior0 * wrong0 + (1.0 - prior0) * wrong1
}

/// Error probability for two equal-width Gaussians at equal priors:
/// `1/2 * [1 + erf(-|x0_a - x0_b| / (2 sigma))]`, evaluated through `erfc`
/// so values far below 1e-15 keep full relative precision.
pub fn equal_width_error(x0_a: f64, x0_b: f64, width_sq: f64) -> f64 {
    assert!(
        width_sq > 0.0 && width_sq.is_finite(),
        "width_sq must be positive and finite"
    );
    0.5 * erfc((x0_a - x0_b).abs() / (2.0 * width_sq.sqrt()))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. Fails explicitly if the recursion depth limit is hit before the
/// tolerance is met.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: usize = 60;
    assert!(tol > 0.0, "tolerance must be positive");
    if a == b {
        return Ok(0.0);
    }

    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::QuadratureNonConvergence {
                tol,
                depth: MAX_DEPTH,
            });
        }
        let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Ok(l + r)
    }

    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent series oracle for erf: the non-alternating expansion
    /// erf(x) = 2x/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n / (2n+1)!!.
    fn erf_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        let z = 2.0 * x * x;
        for n in 1..200 {
            term *= z / (2.0 * n as f64 + 1.0);
            sum += term;
            if term < 1e-20 * sum {
                break;
            }
        }
        2.0 * x / PI.sqrt() * (-x * x).exp() * sum
    }

    #[test]
    fn erf_at_origin_and_odd_symmetry() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(-0.5), -erf(0.5));
    }

    #[test]
    fn erf_matches_series_oracle() {
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-14);
        for i in 0..=40 {
            let x = -2.0 + 4.0 * i as f64 / 40.0;
            assert!(
                (erf(x) - erf_series(x)).abs() < 1e-14,
                "erf({x}) off by {:e}",
                (erf(x) - erf_series(x)).abs()
            );
        }
    }

    #[test]
    fn erf_monotone_and_complement_consistent() {
        let mut prev = -1.0;
        for i in 0..=200 {
            let x = -5.0 + 10.0 * i as f64 / 200.0;
            let e = erf(x);
            assert!(e >= prev);
            assert!(e.abs() <= 1.0);
            assert!((e + erfc(x) - 1.0).abs() < 1e-14);
            prev = e;
        }
    }

    #[test]
    fn pdf_normalizes() {
        let p = GaussianPdf::new(0.7, 2.3).unwrap();
        let total = integrate(|x| p.pdf(x), -20.0, 20.0, 1e-12).unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pdf_rejects_bad_width() {
        assert!(GaussianPdf::new(0.0, 0.0).is_err());
        assert!(GaussianPdf::new(0.0, -1.0).is_err());
        assert!(GaussianPdf::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn mle_symmetric_pair_has_threshold_at_zero() {
        let p0 = GaussianPdf::new(-1.0, 1.0).unwrap();
        let p1 = GaussianPdf::new(1.0, 1.0).unwrap();
        let rule = mle_rule(&p0, &p1, 0.5).unwrap();
        assert_eq!(rule.thresholds().len(), 1);
        assert!(rule.thresholds()[0].abs() < 1e-15);
        assert_eq!(rule.first_label(), 0);
        assert_eq!(rule.label(0.0), 0, "ties go to label 0");
    }

    #[test]
    fn mle_identical_pair_is_degenerate() {
        let p = GaussianPdf::new(0.3, 1.5).unwrap();
        let rule = mle_rule(&p, &p, 0.5).unwrap();
        assert!(rule.is_degenerate());
        assert!(rule.thresholds().is_empty());
        assert_eq!(rule.first_label(), 0);
        assert!((error_probability(&p, &p, 0.5, &rule) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mle_unequal_widths_two_thresholds() {
        // Same means, widths 1 and 4: thresholds at +/- sqrt(4 ln 2 / 3),
        // from solving ln 2 * 1/2 * ... the quadratic by hand.
        let p0 = GaussianPdf::new(0.0, 1.0).unwrap();
        let p1 = GaussianPdf::new(0.0, 4.0).unwrap();
        let rule = mle_rule(&p0, &p1, 0.5).unwrap();
        let expected = (4.0 * std::f64::consts::LN_2 / 3.0).sqrt();
        assert_eq!(rule.thresholds().len(), 2);
        assert!((rule.thresholds()[0] + expected).abs() < 1e-12);
        assert!((rule.thresholds()[1] - expected).abs() < 1e-12);
        // Narrow hypothesis loses in the tails.
        assert_eq!(rule.first_label(), 1);
        assert_eq!(rule.label(0.0), 0);
        assert_eq!(rule.label(5.0), 1);
    }

    #[test]
    fn error_probability_symmetric_pair() {
        let p0 = GaussianPdf::new(-1.0, 1.0).unwrap();
        let p1 = GaussianPdf::new(1.0, 1.0).unwrap();
        let rule = mle_rule(&p0, &p1, 0.5).unwrap();
        let pe = error_probability(&p0, &p1, 0.5, &rule);
        // 1/2 (1 + erf(-1))
        assert!((pe - 0.07864960352514258).abs() < 1e-14);
        // Cross-check against direct numeric integration of the overlap.
        let oracle = 0.5 * integrate(|x| p0.pdf(x).min(p1.pdf(x)), -12.0, 12.0, 1e-13).unwrap();
        assert!((pe - oracle).abs() < 1e-12);
    }

    #[test]
    fn error_probability_separated_pair_underflows_cleanly() {
        let p0 = GaussianPdf::new(-100.0, 1.0).unwrap();
        let p1 = GaussianPdf::new(100.0, 1.0).unwrap();
        let rule = mle_rule(&p0, &p1, 0.5).unwrap();
        let pe = error_probability(&p0, &p1, 0.5, &rule);
        assert!(pe >= 0.0);
        assert!(pe < 1e-300);
    }

    #[test]
    fn equal_width_error_examples() {
        assert!((equal_width_error(1.3, 1.3, 2.0) - 0.5).abs() < 1e-15);
        // Coherent-probe operating point delta = pi, E = 4, eta = 0.9.
        let pe = equal_width_error(-2.0, 2.0, 1.0 + 1.0 / 36.0);
        assert!(pe > 2.4e-3 && pe < 2.8e-3);
        assert!((equal_width_error(-1.0, 1.0, 1.0) - 0.07864960352514258).abs() < 1e-14);
    }

    #[test]
    fn equal_width_error_matches_mle_route() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let m0 = rng.random_range(-3.0..3.0);
            let m1 = rng.random_range(-3.0..3.0);
            let w = rng.random_range(0.1..4.0);
            let p0 = GaussianPdf::new(m0, w).unwrap();
            let p1 = GaussianPdf::new(m1, w).unwrap();
            let rule = mle_rule(&p0, &p1, 0.5).unwrap();
            let via_rule = error_probability(&p0, &p1, 0.5, &rule);
            let direct = equal_width_error(m0, m1, w);
            assert!((via_rule - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn equal_width_error_affine_and_reflection_invariant() {
        let base = equal_width_error(-0.4, 1.1, 0.8);
        assert!((equal_width_error(-0.4 + 2.5, 1.1 + 2.5, 0.8) - base).abs() < 1e-15);
        assert!((equal_width_error(0.4, -1.1, 0.8) - base).abs() < 1e-15);
    }

    #[test]
    fn mle_minimizes_error_probability() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..20 {
            let p0 =
                GaussianPdf::new(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)).unwrap();
            let p1 =
                GaussianPdf::new(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)).unwrap();
            let prior0 = rng.random_range(0.2..0.8);
            let rule = mle_rule(&p0, &p1, prior0).unwrap();
            let best = error_probability(&p0, &p1, prior0, &rule);
            for _ in 0..100 {
                let perturbed: Vec<f64> = rule
                    .thresholds()
                    .iter()
                    .map(|t| t + rng.random_range(-0.5..0.5))
                    .collect();
                let mut sorted = perturbed.clone();
                sorted.sort_by(f64::total_cmp);
                if sorted.windows(2).any(|w| w[0] >= w[1]) {
                    continue;
                }
                let other = DecisionRule::new(sorted, rule.first_label()).unwrap();
                let pe = error_probability(&p0, &p1, prior0, &other);
                assert!(best <= pe + 1e-12);
            }
        }
    }

    #[test]
    fn error_probability_bounds_and_swap_symmetry() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..200 {
            let p0 =
                GaussianPdf::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..4.0)).unwrap();
            let p1 =
                GaussianPdf::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..4.0)).unwrap();
            let prior0 = rng.random_range(0.1..0.9);
            let rule = mle_rule(&p0, &p1, prior0).unwrap();
            let pe = error_probability(&p0, &p1, prior0, &rule);
            assert!(pe >= 0.0 && pe <= prior0.max(1.0 - prior0) + 1e-15);
            if (prior0 - 0.5).abs() < 1e-12 {
                assert!(pe <= 0.5 + 1e-15);
            }
            let swapped_rule = mle_rule(&p1, &p0, 1.0 - prior0).unwrap();
            let swapped = error_probability(&p1, &p0, 1.0 - prior0, &swapped_rule);
            assert!((pe - swapped).abs() < 1e-13);
        }
    }

    #[test]
    fn integrate_constant_and_gaussian() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let total = integrate(|x| (-x * x).exp() / PI.sqrt(), -8.0, 8.0, 1e-12).unwrap();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_cross_checks_the_coherent_baseline_point() {
        // The error-probability integrand at the delta = pi, E = 4, eta = 0.9
        // operating point: means +/-2, squared width 1 + 1/36. Quadrature of
        // the pointwise minimum must match the closed form to 1e-10.
        let w = 1.0 + 1.0 / 36.0;
        let p0 = GaussianPdf::new(-2.0, w).unwrap();
        let p1 = GaussianPdf::new(2.0, w).unwrap();
        let closed = equal_width_error(p0.x0, p1.x0, w);
        let quadrature = integrate(
            |x| (0.5 * p0.pdf(x)).min(0.5 * p1.pdf(x)),
            -14.0,
            14.0,
            1e-12,
        )
        .unwrap();
        assert!((closed - quadrature).abs() < 1e-10);
    }

    #[test]
    fn integrate_reports_non_convergence() {
        // A needle the depth limit cannot resolve at this tolerance.
        let spike = |x: f64| if x.abs() < 1e-18 { 1e18 } else { 0.0 };
        assert!(matches!(
            integrate(spike, -1.0, 1.0, 1e-14),
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn error_probability_bounded_and_swap_symmetric(
                m0 in -3.0..3.0f64,
                m1 in -3.0..3.0f64,
                w0 in 0.2..4.0f64,
                w1 in 0.2..4.0f64,
                prior0 in 0.05..0.95f64,
            ) {
                let p0 = GaussianPdf::new(m0, w0).unwrap();
                let p1 = GaussianPdf::new(m1, w1).unwrap();
                let rule = mle_rule(&p0, &p1, prior0).unwrap();
                let pe = error_probability(&p0, &p1, prior0, &rule);
                prop_assert!(pe >= -1e-15);
                prop_assert!(pe <= prior0.max(1.0 - prior0) + 1e-14);
                let swapped = mle_rule(&p1, &p0, 1.0 - prior0).unwrap();
                let pe_swapped = error_probability(&p1, &p0, 1.0 - prior0, &swapped);
                prop_assert!((pe - pe_swapped).abs() < 1e-12);
            }

            #[test]
            fn masses_partition_the_line(
                m in -3.0..3.0f64,
                w in 0.1..5.0f64,
                t in -4.0..4.0f64,
            ) {
                let p = GaussianPdf::new(m, w).unwrap();
                let below = p.mass(f64::NEG_INFINITY, t);
                let above = p.mass(t, f64::INFINITY);
                prop_assert!(below >= 0.0 && above >= 0.0);
                prop_assert!((below + above - 1.0).abs() < 1e-14);
            }
        }
    }
}
