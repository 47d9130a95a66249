//! Compare the three strategies at the headline operating point
//! delta = pi, E = 4, eta = 0.9.
//!
//! ```sh
//! cargo run --example paper_point
//! ```

use std::f64::consts::PI;

use qread::reading::{numeric_optimal, optimal_strategy, sql_strategy, ReadingTask, SearchConfig};

fn main() {
    let task = ReadingTask::new(PI, 4.0, 0.9).expect("valid task");

    let sql = sql_strategy(&task).expect("closed form");
    let opt = optimal_strategy(&task).expect("closed form");
    let num = numeric_optimal(&task, &SearchConfig::default()).expect("search converges");

    println!(
        "operating point: delta = pi, E = {}, eta = {}",
        task.energy, task.eta
    );
    println!();
    println!(
        "{:<14} {:>10} {:>10} {:>10} {:>14}",
        "strategy", "a", "r", "sinh^2 r", "error prob"
    );
    for s in [&sql, &opt, &num] {
        println!(
            "{:<14} {:>10.6} {:>10.6} {:>10.6} {:>14.6e}",
            s.method.as_str(),
            s.probe.a,
            s.probe.r,
            s.sinh2_r(),
            s.pe
        );
    }
    println!();
    println!(
        "squeezing buys a factor {:.1e} in error probability over the best coherent probe",
        sql.pe / opt.pe
    );
    println!(
        "numeric search agrees with the closed form to {:.1e} (relative pe) and {:.1e} (r)",
        ((num.pe - opt.pe) / opt.pe).abs(),
        (num.probe.r - opt.probe.r).abs()
    );
}
