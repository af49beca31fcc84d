//! Solves for likedness on a small graph and prints every normalization
//! alongside neighbor desirability.
//!
//! ```text
//! cargo run --example solve_likedness
//! ```

use likedness::desirability::{log_drift, log_stationary_normalize, neighbor_desirability};
use likedness::graph::Graph;
use likedness::likedness::{normalize_unique, solve, RateMatrix, SolverConfig};
use likedness::markov::stationary_closed_form;

fn main() -> likedness::Result<()> {
    // a triangle with a pendant vertex hanging off vertex 2
    let graph = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])?;
    let rates = RateMatrix::new(
        &graph,
        [
            (0, 1, 2.0),
            (1, 0, 0.5),
            (0, 2, 1.0),
            (2, 0, 1.5),
            (1, 2, 0.8),
            (2, 1, 1.2),
            (2, 3, 3.0),
            (3, 2, 0.4),
        ],
    )?;

    let solution = solve(&graph, &rates, &SolverConfig::default())?;
    println!(
        "converged in {} iterations, residual {:.1e}",
        solution.iterations, solution.residual
    );
    let p = stationary_closed_form(&graph)?;
    let unique = normalize_unique(&solution.likedness, &p)?;
    let nd = neighbor_desirability(&graph, &rates, &unique)?;
    let log_basis = log_stationary_normalize(&graph, &rates, &unique, &p)?;

    println!("vertex  raw L    L*       log-stat L  ND");
    for i in 0..graph.order() {
        println!(
            "{i:>6}  {:.5}  {:.5}  {:.5}     {:.5}",
            solution.likedness.values()[i],
            unique.values()[i],
            log_basis.values()[i],
            nd.values()[i]
        );
    }
    println!("stationary drift of log ND: {:.5}", log_drift(&graph, &rates, &unique, &p)?);
    Ok(())
}
