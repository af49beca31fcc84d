//! Structural centralities: degree, betweenness, closeness, eigenvector.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Degree,
    Betweenness,
    Closeness,
    Eigenvector,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Degree,
        Measure::Betweenness,
        Measure::Closeness,
        Measure::Eigenvector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Degree => "degree",
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Eigenvector => "eigenvector",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityScores {
    pub measure: Measure,
    pub values: Vec<f64>,
}

pub fn degree_centrality(graph: &Graph) -> CentralityScores {
    CentralityScores {
        measure: Measure::Degree,
        values: (0..graph.order()).map(|v| graph.degree(v) as f64).collect(),
    }
}

/// Unnormalized shortest-path betweenness (Brandes).
///
/// Endpoints are excluded and each unordered pair is counted once.
pub fn betweenness_centrality(graph: &Graph) -> CentralityScores {
    let n = graph.order();
    let mut betweenness = vec![0.0f64; n];
    let mut stack = Vec::with_capacity(n);
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut paths = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        predecessors.iter_mut().for_each(Vec::clear);
        paths.iter_mut().for_each(|x| *x = 0.0);
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        delta.iter_mut().for_each(|x| *x = 0.0);
        paths[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);

        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in graph.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    paths[w] += paths[v];
                    predecessors[w].push(v);
                }
            }
        }

        while let Some(w) = stack.pop() {
            for &v in &predecessors[w] {
                delta[v] += paths[v] / paths[w] * (1.0 + delta[w]);
            }
            if w != s {
                betweenness[w] += delta[w];
            }
        }
    }

    // each pair was visited from both ends
    for b in &mut betweenness {
        *b /= 2.0;
    }
    CentralityScores {
        measure: Measure::Betweenness,
        values: betweenness,
    }
}

/// `(N − 1) / Σⱼ d(i, j)` with hop distances.
pub fn closeness_centrality(graph: &Graph) -> Result<CentralityScores> {
    let n = graph.order();
    let mut values = Vec::with_capacity(n);
    for v in 0..n {
        let mut total = 0usize;
        for d in graph.bfs_distances(v) {
            total += d.ok_or(Error::Disconnected)?;
        }
        values.push(if total == 0 {
            0.0
        } else {
            (n - 1) as f64 / total as f64
        });
    }
    Ok(CentralityScores {
        measure: Measure::Closeness,
        values,
    })
}

/// Perron vector of the adjacency matrix, scaled to unit maximum.
///
/// Iterates `x ← (A + I) x` so that bipartite graphs, whose adjacency has
/// `−λ` in its spectrum, still converge. Stops when the max-norm change of
/// the unit-max iterate is at most `tol`.
pub fn eigenvector_centrality(
    graph: &Graph,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityScores> {
    let n = graph.order();
    if n == 0 {
        return Err(Error::InvalidGraph("graph has no vertices".into()));
    }
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;
    for _ in 0..max_iter {
        for v in 0..n {
            next[v] = x[v] + graph.neighbors(v).iter().map(|&u| x[u]).sum::<f64>();
        }
        let max = next.iter().copied().fold(0.0f64, f64::max);
        next.iter_mut().for_each(|y| *y /= max);
        change = x
            .iter()
            .zip(&next)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut x, &mut next);
        if change <= tol {
            return Ok(CentralityScores {
                measure: Measure::Eigenvector,
                values: x,
            });
        }
    }
    Err(Error::Convergence {
        what: "eigenvector centrality",
        iterations: max_iter,
        residual: change,
    })
}

pub fn centrality(graph: &Graph, measure: Measure) -> Result<CentralityScores> {
    match measure {
        Measure::Degree => Ok(degree_centrality(graph)),
        Measure::Betweenness => {
            if !graph.is_connected() {
                return Err(Error::Disconnected);
            }
            Ok(betweenness_centrality(graph))
        }
        Measure::Closeness => closeness_centrality(graph),
        Measure::Eigenvector => eigenvector_centrality(graph, 1e-12, 100_000),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        assert_eq!(degree_centrality(&Graph::star(4)).values[0], 3.0);
        assert_eq!(degree_centrality(&Graph::complete(3)).values, vec![2.0; 3]);
        let p3 = degree_centrality(&Graph::path(3)).values;
        assert_eq!((p3[0], p3[2]), (1.0, 1.0));
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness_centrality(&Graph::path(3)).values, vec![0.0, 1.0, 0.0]);
        assert_eq!(betweenness_centrality(&Graph::complete(3)).values, vec![0.0; 3]);
        assert_eq!(betweenness_centrality(&Graph::star(5)).values[0], 6.0);
        // two shortest paths between opposite corners of a 4-cycle
        assert_eq!(betweenness_centrality(&Graph::cycle(4)).values, vec![0.5; 4]);
    }

    #[test]
    fn closeness_examples() {
        assert_eq!(closeness_centrality(&Graph::complete(3)).unwrap().values, vec![1.0; 3]);
        let p3 = closeness_centrality(&Graph::path(3)).unwrap().values;
        assert_eq!(p3[1], 1.0);
        assert!((p3[0] - 2.0 / 3.0).abs() < 1e-15);
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(closeness_centrality(&split), Err(Error::Disconnected)));
    }

    #[test]
    fn eigenvector_examples() {
        let k3 = eigenvector_centrality(&Graph::complete(3), 1e-12, 1000).unwrap();
        assert_eq!(k3.values, vec![1.0; 3]);
        let cyc = eigenvector_centrality(&Graph::cycle(6), 1e-12, 1000).unwrap();
        assert!(cyc.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let star = eigenvector_centrality(&Graph::star(4), 1e-13, 10_000).unwrap().values;
        assert_eq!(star[0], 1.0);
        assert!((star[1] - star[2]).abs() < 1e-12 && (star[2] - star[3]).abs() < 1e-12);
        assert!(star[1] < star[0]);
        // leaves of a star with k leaves score 1/sqrt(k)
        assert!((star[1] - 1.0 / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn eigenvector_nonconvergence() {
        let g = Graph::path(9);
        assert!(matches!(
            eigenvector_centrality(&g, 1e-15, 3),
            Err(Error::Convergence { .. })
        ));
    }
}
