//! Homodyne outcome statistics of a squeezed coherent probe: how the mean
//! and width move with the measured quadrature angle, and what detector loss
//! does to them.
//!
//! ```sh
//! cargo run --example homodyne_statistics
//! ```

use std::f64::consts::PI;

use qread::homodyne::{loss_convolution_width, outcome_pdf, HomodyneSetup};
use qread::states::SqueezedCoherentState;

fn main() {
    let probe = SqueezedCoherentState::new(1.5, 0.3, 0.8, -0.6).expect("valid probe");
    println!(
        "probe: a = {}, phi = {}, r = {}, theta = {} (energy {:.4})",
        probe.a,
        probe.phi,
        probe.r,
        probe.theta,
        probe.energy()
    );
    println!();
    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "psi", "mean", "width^2", "width^2 @ eta=0.8"
    );
    for i in 0..=8 {
        let psi = -PI + 2.0 * PI * i as f64 / 8.0;
        let ideal = outcome_pdf(&probe, &HomodyneSetup::new(psi, 1.0).unwrap());
        let lossy = outcome_pdf(&probe, &HomodyneSetup::new(psi, 0.8).unwrap());
        println!(
            "{:>8.4} {:>12.6} {:>12.6} {:>12.6}",
            psi, ideal.x0, ideal.width_sq, lossy.width_sq
        );
    }
    println!();
    println!("loss acts purely as an additive width term and never moves the mean:");
    let ideal = outcome_pdf(&probe, &HomodyneSetup::new(0.4, 1.0).unwrap());
    let lossy = outcome_pdf(&probe, &HomodyneSetup::new(0.4, 0.8).unwrap());
    println!(
        "  width^2({:.2}) + (1 - eta)/(4 eta) = {:.6} = {:.6}",
        ideal.width_sq,
        loss_convolution_width(ideal.width_sq, 0.8),
        lossy.width_sq
    );

    // The narrowest quadrature sits at psi = theta/2 and reads e^{-2r}.
    let narrow = outcome_pdf(&probe, &HomodyneSetup::new(probe.theta / 2.0, 1.0).unwrap());
    println!(
        "  narrowest width^2 = {:.6} at psi = theta/2 (e^(-2r) = {:.6})",
        narrow.width_sq,
        (-2.0 * probe.r).exp()
    );
}
