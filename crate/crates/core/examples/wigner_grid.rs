//! Phase-space pictures of the optimal probes for three phase differences.
//!
//! ```sh
//! cargo run --example wigner_grid
//! ```
//!
//! Writes one CSV matrix per phase difference (rows indexed by x, columns by
//! p), ready for contour plotting. For the quarter-turn case the optimal
//! probe degenerates to the coherent state of the baseline strategy.

use std::f64::consts::PI;

use qread::reading::{optimal_strategy, ReadingTask};

fn main() {
    let n = 121;
    let half = 4.0;
    for (name, delta) in [
        ("wigner_pi.csv", PI),
        ("wigner_pi_2.csv", PI / 2.0),
        ("wigner_pi_6.csv", PI / 6.0),
    ] {
        let task = ReadingTask::new(delta, 4.0, 0.9).expect("valid task");
        let opt = optimal_strategy(&task).expect("closed form");
        let grid = opt
            .probe
            .wigner_grid((-half, half), (-half, half), n)
            .expect("grid evaluates");

        let coord = |i: usize| -half + 2.0 * half * i as f64 / (n - 1) as f64;
        let mut csv = String::from("x\\p");
        for j in 0..n {
            csv.push_str(&format!(",{}", coord(j)));
        }
        csv.push('\n');
        for (i, row) in grid.iter().enumerate() {
            csv.push_str(&format!("{}", coord(i)));
            for w in row {
                csv.push_str(&format!(",{w}"));
            }
            csv.push('\n');
        }
        std::fs::write(name, csv).expect("writable working directory");
        println!(
            "{name}: probe (a = {:.4}, phi = {:.4}, r = {:.4}, theta = {:.4}), pe = {:.3e}{}",
            opt.probe.a,
            opt.probe.phi,
            opt.probe.r,
            opt.probe.theta,
            opt.pe,
            if opt.flags.regime_warning {
                "  [regime warning: search beats this closed form]"
            } else {
                ""
            }
        );
    }
}
