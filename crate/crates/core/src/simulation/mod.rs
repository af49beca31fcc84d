//! Monte Carlo ensembles of like-rates on a fixed graph.
//!
//! Every ensemble draws one independent exponential rate per ordered edge
//! pair, solves for the unique likedness vector and evaluates neighbor
//! desirability. Ensemble `e` draws from a ChaCha stream whose seed is a
//! fixed function of `(master_seed, e)`, and results are reduced in index
//! order, so output depends only on the configuration whether ensembles run
//! sequentially or on a thread pool.

mod aggregate;
pub mod export;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::desirability::neighbor_desirability;
use crate::error::{Error, Result};
use crate::graph::{generate_ba, read_edge_list, BaParams, Graph};
use crate::likedness::{normalize_unique, solve, RateMatrix, SolverConfig};
use crate::markov::{stationary_closed_form, StationaryVector};

pub use aggregate::{
    aggregate, neighbor_pair_curve, AggregateDataset, BinnedCurve, CurveBin, ExperimentFits,
    Histogram, LogBins, NeighborBin, NeighborCurve, NodeStats,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GraphSource {
    Generated(BaParams),
    File { path: PathBuf },
}

impl GraphSource {
    pub fn load(&self) -> Result<Graph> {
        match self {
            GraphSource::Generated(params) => generate_ba(params),
            GraphSource::File { path } => read_edge_list(&std::fs::read_to_string(path)?),
        }
    }
}

/// Log-spaced binning used for the curves and the histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub count: usize,
    /// Bins with fewer observations are left out of curve fits.
    pub min_count: usize,
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec {
            count: 30,
            min_count: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub ensembles: usize,
    /// Rate parameter of the exponential like-rate distribution.
    pub lambda: f64,
    pub master_seed: u64,
    pub solver: SolverConfig,
    pub bins: BinSpec,
    /// Largest tolerated fraction of non-convergent ensembles.
    pub max_failure_fraction: f64,
}

impl ExperimentConfig {
    /// Barabási–Albert graph with `m0 = m = 5`, `t = 95`, λ = 1/2.
    pub fn reference(ensembles: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            graph: GraphSource::Generated(BaParams::new(5, 95, master_seed)),
            ensembles,
            lambda: 0.5,
            master_seed,
            solver: SolverConfig::default(),
            bins: BinSpec::default(),
            max_failure_fraction: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensembles < 1 {
            return Err(Error::InvalidParams("at least one ensemble is required".into()));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.bins.count < 1 {
            return Err(Error::InvalidParams("bin count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.max_failure_fraction) {
            return Err(Error::InvalidParams(
                "max failure fraction must lie in [0, 1]".into(),
            ));
        }
        self.solver.validate()
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of ensemble `index` under `master_seed`.
pub fn ensemble_seed(master_seed: u64, index: u64) -> u64 {
    mix64(mix64(master_seed).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// One exponential draw with rate `lambda` per ordered edge pair.
///
/// Edges are visited in canonical order; for edge `(u, v)` the draw for
/// `R[u][v]` comes before `R[v][u]`.
pub fn sample_rates(graph: &Graph, lambda: f64, seed: u64) -> Result<RateMatrix> {
    let dist = Exp::new(lambda)
        .map_err(|e| Error::InvalidParams(format!("exponential rate {lambda}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let x: f64 = dist.sample(rng);
        if x > 0.0 {
            break x;
        }
    };
    let mut entries = Vec::with_capacity(2 * graph.edge_count());
    for &(u, v) in graph.edges() {
        entries.push((u, v, draw(&mut rng)));
        entries.push((v, u, draw(&mut rng)));
    }
    RateMatrix::new(graph, entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub index: usize,
    /// Unique likedness (`p · L = 1`).
    pub likedness: Vec<f64>,
    pub desirability: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFailure {
    pub index: usize,
    pub message: String,
    pub residual: Option<f64>,
}

/// Solves one ensemble.
pub fn run_ensemble(
    graph: &Graph,
    stationary: &StationaryVector,
    cfg: &ExperimentConfig,
    index: usize,
) -> std::result::Result<EnsembleResult, EnsembleFailure> {
    let fail = |err: Error| EnsembleFailure {
        index,
        residual: match &err {
            Error::Convergence { residual, .. } => Some(*residual),
            _ => None,
        },
        message: err.to_string(),
    };
    let seed = ensemble_seed(cfg.master_seed, index as u64);
    let rates = sample_rates(graph, cfg.lambda, seed).map_err(fail)?;
    let solution = solve(graph, &rates, &cfg.solver).map_err(fail)?;
    let unique = normalize_unique(&solution.likedness, stationary).map_err(fail)?;
    let nd = neighbor_desirability(graph, &rates, &unique).map_err(fail)?;
    Ok(EnsembleResult {
        index,
        likedness: unique.into_values(),
        desirability: nd.into_values(),
        iterations: solution.iterations,
        residual: solution.residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub graph: Graph,
    pub results: Vec<EnsembleResult>,
    pub failures: Vec<EnsembleFailure>,
    pub aggregate: AggregateDataset,
}

/// Loads the configured graph and runs the experiment on it.
pub fn run_experiment(cfg: &ExperimentConfig, execution: Execution) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let graph = cfg.graph.load()?;
    run_on_graph(graph, cfg, execution)
}

pub fn run_on_graph(
    graph: Graph,
    cfg: &ExperimentConfig,
    execution: Execution,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    graph.require_walkable()?;
    let stationary = stationary_closed_form(&graph)?;
    let outcomes: Vec<_> = match execution {
        Execution::Sequential => (0..cfg.ensembles)
            .map(|e| run_ensemble(&graph, &stationary, cfg, e))
            .collect(),
        Execution::Parallel => (0..cfg.ensembles)
            .into_par_iter()
            .map(|e| run_ensemble(&graph, &stationary, cfg, e))
            .collect(),
    };
    let mut results = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(f) => failures.push(f),
        }
    }
    let limit = cfg.max_failure_fraction * cfg.ensembles as f64;
    if failures.len() as f64 > limit || results.is_empty() {
        return Err(Error::TooManyFailures {
            failed: failures.len(),
            total: cfg.ensembles,
            limit: 100.0 * cfg.max_failure_fraction,
        });
    }
    let aggregate = aggregate(&graph, &results, failures.len(), &cfg.bins)?;
    Ok(ExperimentOutput {
        graph,
        results,
        failures,
        aggregate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rates_per_edge() {
        let g = Graph::cycle(6);
        let r = sample_rates(&g, 0.5, 11).unwrap();
        assert_eq!(r.len(), 12);
        assert_eq!(r, sample_rates(&g, 0.5, 11).unwrap());
        assert_ne!(r, sample_rates(&g, 0.5, 12).unwrap());
    }

    #[test]
    fn exponential_mean() {
        let g = Graph::complete(317);
        let r = sample_rates(&g, 0.5, 2024).unwrap();
        assert!(r.len() >= 100_000);
        let mean = r.iter().map(|(_, _, x)| x).sum::<f64>() / r.len() as f64;
        assert!((mean - 2.0).abs() < 0.03, "mean {mean}");
    }

    #[test]
    fn ensemble_seeds_are_distinct() {
        let seeds: std::collections::HashSet<_> = (0..10_000).map(|e| ensemble_seed(7, e)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(ensemble_seed(7, 0), ensemble_seed(8, 0));
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::reference(10, 1);
        assert!(cfg.validate().is_ok());
        cfg.ensembles = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidParams(_))));
        cfg.ensembles = 1;
        cfg.lambda = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_ensemble_on_triangle() {
        let mut cfg = ExperimentConfig::reference(1, 3);
        cfg.graph = GraphSource::Generated(BaParams {
            m0: 3,
            t: 0,
            m: 1,
            seed: 0,
        });
        let out = run_experiment(&cfg, Execution::Sequential).unwrap();
        assert_eq!(out.results.len(), 1);
        assert!(out.failures.is_empty());
        assert!(out.results[0].residual <= 1e-10);
    }

    #[test]
    fn failures_over_limit_abort() {
        let mut cfg = ExperimentConfig::reference(4, 3);
        cfg.graph = GraphSource::Generated(BaParams::new(3, 5, 1));
        cfg.solver.max_iter = 1;
        assert!(matches!(
            run_experiment(&cfg, Execution::Sequential),
            Err(Error::TooManyFailures { failed: 4, total: 4, .. })
        ));
    }
}
