//! The simple random walk on a graph: transition matrix, stationary
//! distribution and truncated power sums.
//!
//! Rows of the transition matrix are stored sparsely; iterates are dense
//! vectors multiplied from the left (`x ↦ xᵀP`).

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{compensated_sum, CompensatedSum};

/// Row-stochastic matrix `P = diag(1/δ) A` of the simple random walk.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    /// Errors with [`Error::DegenerateGraph`] on an isolated vertex.
    pub fn new(graph: &Graph) -> Result<Self> {
        if graph.order() == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let rows = (0..graph.order())
            .map(|v| {
                let nbrs = graph.neighbors(v);
                if nbrs.is_empty() {
                    return Err(Error::DegenerateGraph { vertex: v });
                }
                let w = 1.0 / nbrs.len() as f64;
                Ok(nbrs.iter().map(|&u| (u, w)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TransitionMatrix { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|&&(k, _)| k == j)
            .map_or(0.0, |&(_, w)| w)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; n];
                for &(j, w) in row {
                    dense[j] = w;
                }
                dense
            })
            .collect()
    }

    /// `out = xᵀP`.
    pub fn left_mul_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for &(j, w) in row {
                out[j] += xi * w;
            }
        }
    }

    pub fn left_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.left_mul_into(x, &mut out);
        out
    }
}

pub fn transition_matrix(graph: &Graph) -> Result<TransitionMatrix> {
    TransitionMatrix::new(graph)
}

/// Probability vector invariant under the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryVector {
    values: Vec<f64>,
}

impl StationaryVector {
    /// Wraps `values` after checking positivity and unit mass.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Numerical(
                "stationary entries must be positive and finite".into(),
            ));
        }
        let total = compensated_sum(values.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!(
                "stationary vector sums to {total}, not 1"
            )));
        }
        Ok(StationaryVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl std::ops::Index<usize> for StationaryVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// `pᵢ = δᵢ / Σⱼ δⱼ`, the stationary distribution of a connected
/// undirected graph.
pub fn stationary_closed_form(graph: &Graph) -> Result<StationaryVector> {
    graph.require_walkable()?;
    let total = 2.0 * graph.edge_count() as f64;
    StationaryVector::from_values(
        (0..graph.order())
            .map(|v| graph.degree(v) as f64 / total)
            .collect(),
    )
}

/// Stationary distribution by iteration from the uniform vector.
///
/// Each step replaces the iterate with the average of itself and its image
/// under the walk, which is the lazy walk `(I + P) / 2`. It has the same
/// invariant vector as `P` but does not oscillate on bipartite graphs.
/// Stops once `‖xᵀP − x‖₁ ≤ tol`.
pub fn stationary(graph: &Graph, tol: f64, max_iter: usize) -> Result<StationaryVector> {
    graph.require_walkable()?;
    let p = TransitionMatrix::new(graph)?;
    let n = p.dim();
    let mut x = vec![1.0 / n as f64; n];
    let mut image = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..=max_iter {
        p.left_mul_into(&x, &mut image);
        residual = compensated_sum(x.iter().zip(&image).map(|(a, b)| (a - b).abs()));
        if residual <= tol {
            let mass = compensated_sum(x.iter().copied());
            x.iter_mut().for_each(|v| *v /= mass);
            return StationaryVector::from_values(x);
        }
        for (xi, yi) in x.iter_mut().zip(&image) {
            *xi = 0.5 * (*xi + yi);
        }
    }
    Err(Error::Convergence {
        what: "stationary distribution",
        iterations: max_iter,
        residual,
    })
}

/// Row `i` of `Σ_{t=0}^{n_max} Pᵗ`, built from repeated vector–matrix
/// products with per-entry compensated accumulation.
pub fn power_sum_row(graph: &Graph, i: usize, n_max: usize) -> Result<Vec<f64>> {
    let p = TransitionMatrix::new(graph)?;
    Ok(power_sum_row_with(&p, i, n_max))
}

pub fn power_sum_row_with(p: &TransitionMatrix, i: usize, n_max: usize) -> Vec<f64> {
    let n = p.dim();
    let mut current = vec![0.0; n];
    current[i] = 1.0;
    let mut next = vec![0.0; n];
    let mut acc = vec![CompensatedSum::new(); n];
    acc[i].add(1.0);
    for _ in 0..n_max {
        p.left_mul_into(&current, &mut next);
        std::mem::swap(&mut current, &mut next);
        for (a, &c) in acc.iter_mut().zip(&current) {
            if c != 0.0 {
                a.add(c);
            }
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}
