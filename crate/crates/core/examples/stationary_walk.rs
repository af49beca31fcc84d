//! Random-walk machinery: the transition matrix, the stationary vector by
//! iteration against its degree closed form, and Cesàro averages of the
//! power sums on a bipartite graph where plain powers oscillate.
//!
//! ```text
//! cargo run --example stationary_walk
//! ```

use likedness::graph::Graph;
use likedness::markov::{power_sum_row, stationary, stationary_closed_form, transition_matrix};

fn main() -> likedness::Result<()> {
    let path = Graph::path(4);
    let p = transition_matrix(&path)?;
    println!("transition matrix of the path 0-1-2-3:");
    for row in p.to_dense() {
        println!("  {row:?}");
    }

    let iterated = stationary(&path, 1e-13, 100_000)?;
    let exact = stationary_closed_form(&path)?;
    println!("iterated   {:?}", iterated.values());
    println!("closed form {:?}", exact.values());

    for n in [1, 10, 100, 1000, 10_000] {
        let row = power_sum_row(&path, 0, n)?;
        let mean: Vec<String> = row.iter().map(|w| format!("{:.4}", w / n as f64)).collect();
        println!("n = {n:>5}: (1/n) row 0 = [{}]", mean.join(", "));
    }
    Ok(())
}
