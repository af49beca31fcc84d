//! Scaled-down rate-ensemble experiment on a Barabási–Albert graph.
//!
//! ```text
//! cargo run --release --example monte_carlo -- [ensembles] [seed]
//! ```

use likedness::centrality::Measure;
use likedness::simulation::{run_experiment, Execution, ExperimentConfig};

fn main() -> likedness::Result<()> {
    let mut args = std::env::args().skip(1);
    let ensembles = args.next().map_or(1000, |s| s.parse().expect("ensemble count"));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed"));

    let cfg = ExperimentConfig::reference(ensembles, seed);
    let started = std::time::Instant::now();
    let out = run_experiment(&cfg, Execution::Parallel)?;
    let agg = &out.aggregate;
    println!(
        "{} ensembles ({} failed) on {} vertices / {} edges in {:.2?}",
        agg.accepted,
        agg.failed,
        out.graph.order(),
        out.graph.edge_count(),
        started.elapsed()
    );
    let mean_iters =
        out.results.iter().map(|r| r.iterations as f64).sum::<f64>() / out.results.len() as f64;
    println!("mean solver iterations: {mean_iters:.1}");

    if let Some(f) = &agg.fits.desirability_vs_likedness {
        println!(
            "ND vs L*        : {:.3} * L*^{:.3}   R² = {:.4}",
            f.amplitude,
            f.exponent,
            f.r_squared.unwrap_or(f64::NAN)
        );
    }
    for m in Measure::ALL {
        if let Some(f) = agg.centrality_fit(m) {
            println!(
                "ND vs {:<11}: {:.3} * x^{:.4}   R² = {:.4}",
                m.name(),
                f.amplitude,
                f.exponent,
                f.r_squared.unwrap_or(f64::NAN)
            );
        }
    }
    if let Some(f) = &agg.fits.neighbor_curve {
        println!(
            "<ND_nbr> vs ND  : {:.3} * exp({:.4} ND)   R² = {:.4}",
            f.amplitude,
            f.exponent,
            f.r_squared.unwrap_or(f64::NAN)
        );
    }
    if let Some(r) = agg.neighbor_curve.correlation {
        println!("corr(ND, <ND_nbr>) = {r:.4}");
    }
    Ok(())
}
