//! Map where the closed-form strategy stops being optimal.
//!
//! ```sh
//! cargo run --example numeric_search
//! ```
//!
//! The closed form fixes the squeezing phase; for small phase differences
//! and low energy budgets an unrestricted `(r, theta)` search does strictly
//! better, switching to a pure squeezed-vacuum probe whose two hypothesis
//! widths differ. This sweep reports the empirical energy threshold per
//! phase difference - reported, not asserted, since the boundary is a smooth
//! crossover. Note the quarter-turn column: the breakdown reaches delta =
//! pi/2 itself at low energy.

use std::f64::consts::PI;

use qread::reading::{numeric_optimal, optimal_strategy, ReadingTask, SearchConfig};

fn main() {
    let config = SearchConfig {
        grid_r: 120,
        grid_theta: 120,
        param_tol: 1e-8,
        max_refine_evals: 4000,
    };
    let energies: Vec<f64> = (1..=24).map(|i| 0.125 * i as f64).collect();
    println!(
        "per (delta, eta): largest energy at which the search beats the closed form by > 1e-9"
    );
    println!(
        "{:>10} {:>8} {:>12} {:>16}",
        "delta", "eta", "threshold E", "gain at E=0.25"
    );
    for (label, delta) in [
        ("pi/6", PI / 6.0),
        ("pi/3", PI / 3.0),
        ("pi/2", PI / 2.0),
        ("0.55pi", 0.55 * PI),
        ("3pi/4", 3.0 * PI / 4.0),
    ] {
        for eta in [1.0, 0.8] {
            let mut threshold: Option<f64> = None;
            let mut low_e_gain = 0.0;
            for &energy in &energies {
                let task = ReadingTask::new(delta, energy, eta).unwrap();
                let closed = optimal_strategy(&task).unwrap();
                let searched = numeric_optimal(&task, &config).unwrap();
                let gain = closed.pe - searched.pe;
                if gain > 1e-9 {
                    threshold = Some(energy);
                }
                if (energy - 0.25).abs() < 1e-12 {
                    low_e_gain = gain;
                }
            }
            match threshold {
                Some(t) => println!("{label:>10} {eta:>8} {t:>12.3} {low_e_gain:>16.3e}"),
                None => println!("{label:>10} {eta:>8} {:>12} {low_e_gain:>16.3e}", "none"),
            }
        }
    }
}
