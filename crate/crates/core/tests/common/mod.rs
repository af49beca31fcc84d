//! Fixtures shared by the integration test targets.
#![allow(dead_code)]

use likedness::graph::Graph;
use likedness::likedness::RateMatrix;
use likedness::simulation::sample_rates;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected graph on `n` vertices: a random recursive tree plus each
/// remaining pair with probability `extra`.
pub fn random_connected(n: usize, extra: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < extra {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// `count` connected graphs with orders drawn from `lo..=hi`.
pub fn graph_suite(count: usize, lo: usize, hi: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(lo..=hi);
            let extra = rng.random_range(0.05..0.6);
            random_connected(n, extra, rng.random())
        })
        .collect()
}

/// Exponential rates with unit mean.
pub fn exp_rates(graph: &Graph, seed: u64) -> RateMatrix {
    sample_rates(graph, 1.0, seed).unwrap()
}

pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}
