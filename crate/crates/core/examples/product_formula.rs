//! Compares the solved likedness vector with the truncated random-walk
//! product of neighbor desirabilities, with and without the per-vertex
//! AM–GM gap added to each base.
//!
//! ```text
//! cargo run --release --example product_formula -- [seed]
//! ```

use likedness::desirability::{am_gm_gap, log_stationary_normalize, product_formula_report};
use likedness::graph::{generate_ba, BaParams};
use likedness::likedness::{solve, SolverConfig};
use likedness::markov::stationary_closed_form;
use likedness::simulation::sample_rates;

fn main() -> likedness::Result<()> {
    let seed = std::env::args().nth(1).map_or(3, |s| s.parse().expect("seed"));
    let graph = generate_ba(&BaParams::new(3, 7, seed))?;
    let rates = sample_rates(&graph, 1.0, seed)?;
    let solution = solve(&graph, &rates, &SolverConfig::default())?;
    let p = stationary_closed_form(&graph)?;

    let basis = log_stationary_normalize(&graph, &rates, &solution.likedness, &p)?;
    let gap = am_gm_gap(&graph, &rates, &basis)?;
    println!("log AM/GM gap per vertex: {gap:.4?}");

    println!("     n   ratio CV   gap-corrected CV");
    for n in [10, 100, 1000, 5000] {
        let report = product_formula_report(&graph, &rates, &solution.likedness, &p, n)?;
        println!(
            "{n:>6}   {:.3e}   {:.3e}",
            report.ratio_cv, report.gap_corrected_ratio_cv
        );
    }
    Ok(())
}
