//! Energy/error tradeoff curves as CSV, one lossless and one lossy, plus the
//! small-phase-difference regime.
//!
//! ```sh
//! cargo run --example tradeoff_curve
//! ```
//!
//! Writes `tradeoff_pi.csv`, `tradeoff_pi_lossy.csv` and
//! `tradeoff_small_delta.csv` into the working directory; the lossless file
//! carries the extra `pe_hybrid` column with the unrestricted-measurement
//! bound.

use std::f64::consts::PI;

use qread::cli::curve_csv;
use qread::reading::tradeoff_curve;

fn main() {
    let grid: Vec<f64> = (0..=60).map(|i| 6.0 * i as f64 / 60.0).collect();

    for (name, delta, eta) in [
        ("tradeoff_pi.csv", PI, 1.0),
        ("tradeoff_pi_lossy.csv", PI, 0.9),
        ("tradeoff_small_delta.csv", PI / 180.0, 1.0),
    ] {
        let rows = tradeoff_curve(delta, eta, &grid).expect("curve evaluates");
        std::fs::write(name, curve_csv(&rows)).expect("writable working directory");
        let last = rows.last().unwrap();
        println!(
            "{name}: {} rows, pe_opt(E = {}) = {:.3e} (coherent baseline {:.3e})",
            rows.len(),
            last.energy,
            last.pe_opt,
            last.pe_sql
        );
    }
}
