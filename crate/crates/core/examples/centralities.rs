//! Structural centralities of a Barabási–Albert graph next to the mean
//! neighbor desirability of each vertex over a few rate ensembles.
//!
//! ```text
//! cargo run --release --example centralities -- [ensembles]
//! ```

use likedness::centrality::{centrality, Measure};
use likedness::simulation::{run_experiment, Execution, ExperimentConfig};

fn main() -> likedness::Result<()> {
    let ensembles = std::env::args().nth(1).map_or(200, |s| s.parse().expect("ensemble count"));
    let cfg = ExperimentConfig::reference(ensembles, 1);
    let out = run_experiment(&cfg, Execution::Parallel)?;
    let graph = &out.graph;

    let scores: Vec<Vec<f64>> = Measure::ALL
        .iter()
        .map(|&m| centrality(graph, m).map(|s| s.values))
        .collect::<likedness::Result<_>>()?;

    let mut order: Vec<usize> = (0..graph.order()).collect();
    order.sort_by(|&a, &b| scores[1][b].total_cmp(&scores[1][a]));
    println!("vertex  degree  betweenness  closeness  eigenvector  mean ND");
    for &v in order.iter().take(10).chain(order.iter().rev().take(3)) {
        println!(
            "{v:>6}  {:>6.0}  {:>11.2}  {:>9.4}  {:>11.4}  {:.4}",
            scores[0][v], scores[1][v], scores[2][v], scores[3][v], out.aggregate.nodes[v].mean_desirability
        );
    }
    for m in Measure::ALL {
        if let Some(f) = out.aggregate.centrality_fit(m) {
            println!("ND ~ {:<11} exponent {:+.4}", m.name(), f.exponent);
        }
    }
    Ok(())
}
