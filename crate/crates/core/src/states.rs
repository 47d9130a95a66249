//! Squeezed coherent probe states.
//!
//! A probe is parametrized by `(a, phi, r, theta)` for the state obtained by
//! squeezing the vacuum with parameter `r e^{i theta}` and then displacing it
//! by `a e^{i phi}`. The displacement and squeezing magnitudes are kept
//! nonnegative, with the phases carrying sign information; phases are stored
//! reduced to `(-pi, pi]` so equal states compare equal.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Reduce an angle to the half-open interval `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// A squeezed coherent state `(a, phi, r, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedCoherentState {
    /// Displacement magnitude, `a >= 0`.
    pub a: f64,
    /// Displacement phase, reduced to `(-pi, pi]`.
    pub phi: f64,
    /// Squeezing magnitude, `r >= 0`.
    pub r: f64,
    /// Squeezing phase, reduced to `(-pi, pi]`.
    pub theta: f64,
}

impl SqueezedCoherentState {
    pub fn new(a: f64, phi: f64, r: f64, theta: f64) -> Result<Self> {
        if !(a.is_finite() && phi.is_finite() && r.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParameter(
                "state parameters must be finite".into(),
            ));
        }
        if a < 0.0 || r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "displacement and squeezing magnitudes must be nonnegative, got a = {a}, r = {r}"
            )));
        }
        Ok(Self {
            a,
            phi: wrap_angle(phi),
            r,
            theta: wrap_angle(theta),
        })
    }

    pub fn vacuum() -> Self {
        Self {
            a: 0.0,
            phi: 0.0,
            r: 0.0,
            theta: 0.0,
        }
    }

    /// Coherent state `a e^{i phi}` (no squeezing).
    pub fn coherent(a: f64, phi: f64) -> Result<Self> {
        Self::new(a, phi, 0.0, 0.0)
    }

    /// Mean photon number `a^2 + sinh^2 r`.
    pub fn energy(&self) -> f64 {
        self.a * self.a + self.r.sinh().powi(2)
    }

    /// Action of a phase shifter by `delta`: the displacement phase advances
    /// by `delta` and the squeezing phase by `2 delta`; magnitudes (and hence
    /// the energy) are unchanged.
    pub fn apply_phase_shift(&self, delta: f64) -> Self {
        Self {
            a: self.a,
            phi: wrap_angle(self.phi + delta),
            r: self.r,
            theta: wrap_angle(self.theta + 2.0 * delta),
        }
    }

    /// Wigner function at the phase-space point `(x, p)`:
    /// `W(x, p) = exp(-(x'^2 + p'^2)) / pi` with
    ///
    /// ```text
    /// (x')   ( e^{-r} cos(theta/2)   sin(theta/2)        ) (x)   (a cos phi)
    /// (p') = ( -sin(theta/2)         e^{r} cos(theta/2)  ) (p) - (a sin phi)
    /// ```
    ///
    /// The shear matrix has unit determinant, so the function integrates to 1
    /// for every parameter choice.
    pub fn wigner(&self, x: f64, p: f64) -> f64 {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let xp = (-self.r).exp() * c * x + s * p - self.a * self.phi.cos();
        let pp = -s * x + self.r.exp() * c * p - self.a * self.phi.sin();
        (-(xp * xp + pp * pp)).exp() / PI
    }

    /// Row-major sampling of the Wigner function: entry `[i][j]` is the value
    /// at `(x_i, p_j)` on the inclusive `n x n` grid spanning the ranges.
    pub fn wigner_grid(
        &self,
        x_range: (f64, f64),
        p_range: (f64, f64),
        n: usize,
    ) -> Result<Vec<Vec<f64>>> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 points per axis, got {n}"
            )));
        }
        let coord =
            |range: (f64, f64), i: usize| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64;
        Ok((0..n)
            .map(|i| {
                let x = coord(x_range, i);
                (0..n).map(|j| self.wigner(x, coord(p_range, j))).collect()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_lands_in_half_open_interval() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert_eq!(wrap_angle(0.0), 0.0);
        for k in -5..=5 {
            let w = wrap_angle(1.2 + 2.0 * PI * k as f64);
            assert!((w - 1.2).abs() < 1e-12);
        }
    }

    #[test]
    fn magnitudes_must_be_nonnegative() {
        assert!(SqueezedCoherentState::new(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(SqueezedCoherentState::new(0.0, 0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn energy_examples() {
        assert_eq!(SqueezedCoherentState::vacuum().energy(), 0.0);
        let coherent = SqueezedCoherentState::coherent(2.0, 0.3).unwrap();
        assert!((coherent.energy() - 4.0).abs() < 1e-15);
        let s = SqueezedCoherentState::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!((s.energy() - (1.0 + 1.0f64.sinh().powi(2))).abs() < 1e-15);
        assert!((s.energy() - 2.3810978455418157).abs() < 1e-12);
    }

    #[test]
    fn phase_shift_rules() {
        let s = SqueezedCoherentState::new(1.5, 0.2, 0.7, -0.4).unwrap();
        let id = s.apply_phase_shift(0.0);
        assert_eq!(s, id);

        let half_pi = s.apply_phase_shift(PI / 2.0);
        assert!((half_pi.phi - wrap_angle(0.2 + PI / 2.0)).abs() < 1e-15);
        assert!((half_pi.theta - wrap_angle(-0.4 + PI)).abs() < 1e-15);

        let pi_shift = s.apply_phase_shift(PI);
        assert!((pi_shift.phi - wrap_angle(0.2 + PI)).abs() < 1e-15);
        assert!((pi_shift.theta - s.theta).abs() < 1e-12, "e^{{i 2 pi}} = 1");
    }

    #[test]
    fn phase_shifts_compose_and_conserve_energy() {
        let s = SqueezedCoherentState::new(1.1, -0.9, 0.5, 2.0).unwrap();
        let once = s.apply_phase_shift(0.7).apply_phase_shift(-2.3);
        let combined = s.apply_phase_shift(0.7 - 2.3);
        assert!((once.phi - combined.phi).abs() < 1e-12);
        assert!((once.theta - combined.theta).abs() < 1e-12);
        assert!((s.energy() - once.energy()).abs() < 1e-15);
    }

    #[test]
    fn wigner_vacuum_and_positivity() {
        let vac = SqueezedCoherentState::vacuum();
        assert!((vac.wigner(0.0, 0.0) - 1.0 / PI).abs() < 1e-15);
        let s = SqueezedCoherentState::new(1.0, 0.4, 0.8, 1.3).unwrap();
        for i in -4..=4 {
            for j in -4..=4 {
                assert!(s.wigner(i as f64, j as f64) > 0.0);
            }
        }
    }

    #[test]
    fn wigner_coherent_peak_at_displacement() {
        let s = SqueezedCoherentState::coherent(1.5, 0.8).unwrap();
        let peak = (1.5 * 0.8f64.cos(), 1.5 * 0.8f64.sin());
        let w_peak = s.wigner(peak.0, peak.1);
        assert!((w_peak - 1.0 / PI).abs() < 1e-15);
        for (dx, dp) in [(0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1)] {
            assert!(s.wigner(peak.0 + dx, peak.1 + dp) < w_peak);
        }
    }

    #[test]
    fn wigner_normalizes_for_energetic_states() {
        // 2-D trapezoid oracle on a fine fixed grid. Both the window and the
        // step matter: the anti-squeezed axis decays on the scale e^r, so at
        // r ~ 1.4 the support stretches past +/-20, while the squeezed axis
        // narrows to ~e^{-r} and needs the fine step.
        let (half, n) = (26.0, 1301usize);
        let h = 2.0 * half / (n - 1) as f64;
        for s in [
            SqueezedCoherentState::coherent(2.0, 0.5).unwrap(),
            SqueezedCoherentState::new(1.2, -1.0, 1.0, 0.9).unwrap(),
            SqueezedCoherentState::new(0.0, 0.0, 1.4, -2.0).unwrap(),
        ] {
            assert!(s.energy() <= 4.0 + 1e-12);
            let mut total = 0.0;
            for i in 0..n {
                let x = -half + i as f64 * h;
                let edge_x = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                for j in 0..n {
                    let p = -half + j as f64 * h;
                    let edge = edge_x * if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                    total += edge * s.wigner(x, p);
                }
            }
            total *= h * h;
            assert!((total - 1.0).abs() < 1e-8, "total = {total}");
        }
    }

    #[test]
    fn wigner_grid_corners_match_pointwise_calls() {
        let s = SqueezedCoherentState::new(0.9, 0.2, 0.3, 0.5).unwrap();
        let g = s.wigner_grid((-2.0, 2.0), (-1.0, 3.0), 2).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].len(), 2);
        assert_eq!(g[0][0], s.wigner(-2.0, -1.0));
        assert_eq!(g[0][1], s.wigner(-2.0, 3.0));
        assert_eq!(g[1][0], s.wigner(2.0, -1.0));
        assert_eq!(g[1][1], s.wigner(2.0, 3.0));
        assert!(s.wigner_grid((-1.0, 1.0), (-1.0, 1.0), 1).is_err());
    }

    #[test]
    fn wigner_grid_vacuum_symmetric() {
        let g = SqueezedCoherentState::vacuum()
            .wigner_grid((-3.0, 3.0), (-3.0, 3.0), 41)
            .unwrap();
        let n = g.len();
        for i in 0..n {
            for j in 0..n {
                assert!((g[i][j] - g[n - 1 - i][j]).abs() < 1e-14);
                assert!((g[i][j] - g[i][n - 1 - j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn wigner_grid_argmax_near_coherent_displacement() {
        let s = SqueezedCoherentState::coherent(1.8, 2.3).unwrap();
        let n = 101;
        let g = s.wigner_grid((-4.0, 4.0), (-4.0, 4.0), n).unwrap();
        let mut best = (0, 0);
        for i in 0..n {
            for j in 0..n {
                if g[i][j] > g[best.0][best.1] {
                    best = (i, j);
                }
            }
        }
        let cell = 8.0 / (n - 1) as f64;
        let x = -4.0 + best.0 as f64 * cell;
        let p = -4.0 + best.1 as f64 * cell;
        assert!((x - 1.8 * 2.3f64.cos()).abs() <= cell);
        assert!((p - 1.8 * 2.3f64.sin()).abs() <= cell);
    }

    #[test]
    fn coherent_wigner_rotates_with_displacement_phase() {
        // For r = 0 the Wigner function is a unit Gaussian centered on the
        // displacement, so advancing phi by delta rotates the whole plot.
        let (a, phi, delta) = (1.3, 0.4, 0.9);
        let orig = SqueezedCoherentState::coherent(a, phi).unwrap();
        let turned = SqueezedCoherentState::coherent(a, phi + delta).unwrap();
        for (x, p) in [(0.3, -1.0), (1.0, 1.0), (-0.7, 0.2), (2.0, -0.5)] {
            let (xr, pr) = (
                delta.cos() * x + delta.sin() * p,
                -delta.sin() * x + delta.cos() * p,
            );
            assert!((turned.wigner(x, p) - orig.wigner(xr, pr)).abs() < 1e-10);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn wrap_angle_is_canonical(x in -50.0..50.0f64, k in -3i32..=3) {
                let w = wrap_angle(x);
                prop_assert!(w > -PI && w <= PI);
                // Wrapping is stable and respects 2 pi periodicity.
                prop_assert!((wrap_angle(w) - w).abs() < 1e-15);
                let shifted = wrap_angle(x + 2.0 * PI * k as f64);
                prop_assert!((shifted - w).abs() < 1e-9);
            }

            #[test]
            fn phase_shift_keeps_energy_and_composes(
                a in 0.0..2.0f64,
                phi in -3.0..3.0f64,
                r in 0.0..1.5f64,
                theta in -3.0..3.0f64,
                d1 in -3.0..3.0f64,
                d2 in -3.0..3.0f64,
            ) {
                let s = SqueezedCoherentState::new(a, phi, r, theta).unwrap();
                let stepwise = s.apply_phase_shift(d1).apply_phase_shift(d2);
                let combined = s.apply_phase_shift(d1 + d2);
                prop_assert!((stepwise.energy() - s.energy()).abs() < 1e-12);
                prop_assert!((wrap_angle(stepwise.phi - combined.phi)).abs() < 1e-9);
                prop_assert!((wrap_angle(stepwise.theta - combined.theta)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn coherent_wigner_under_phase_shifter_rotates_doubled() {
        // A phase shifter advances the squeezing phase twice as fast as the
        // displacement phase, and the shear matrix turns with theta/2; in
        // this convention the r = 0 plot therefore rotates by 2 delta.
        let (a, phi, delta) = (1.3, 0.4, 0.9);
        let orig = SqueezedCoherentState::coherent(a, phi).unwrap();
        let shifted = orig.apply_phase_shift(delta);
        let two = 2.0 * delta;
        for (x, p) in [(0.3, -1.0), (1.0, 1.0), (-0.7, 0.2), (2.0, -0.5)] {
            let (xr, pr) = (
                two.cos() * x + two.sin() * p,
                -two.sin() * x + two.cos() * p,
            );
            assert!((shifted.wigner(x, p) - orig.wigner(xr, pr)).abs() < 1e-10);
        }
    }
}
