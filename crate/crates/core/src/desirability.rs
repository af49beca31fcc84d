//! Neighbor desirability and the random-walk product formula.
//!
//! The neighbor desirability of a vertex is the geometric mean of the rates
//! at which it is liked divided by the arithmetic mean of its neighbors'
//! likedness:
//!
//! ```text
//! NDᵢ = (Πⱼ Rᵢⱼ)^(1/δᵢ) / (σᵢ / δᵢ)
//! ```
//!
//! Likedness is related to desirability through the walk on the graph:
//!
//! ```text
//! Lᵢ ∝ lim_{n→∞} Πⱼ NDⱼ^(Σ_{t=0}^{n} Pᵗ)ᵢⱼ
//! ```
//!
//! The exponents grow linearly in `n`, so the truncated product only settles
//! once `L` is scaled to make the stationary-weighted mean of `log ND`
//! vanish ([`log_stationary_normalize`]). [`product_formula_report`]
//! measures how far the truncated product is from a constant multiple of the
//! solved vector.
//!
//! At a raw fixed point the identity `(I − P) log L = log ND + J` holds
//! exactly, where `Jᵢ ≥ 0` is the gap between the arithmetic and geometric
//! means of `{Rᵢⱼ Lⱼ}` over the neighbors of `i` ([`am_gm_gap`]). The product
//! formula drops `J`, so it is exact only when the gap is the same at every
//! vertex; the report carries both the plain and the gap-corrected ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::likedness::{sigma, LikednessVector, Normalization, RateMatrix};
use crate::markov::{power_sum_row_with, StationaryVector, TransitionMatrix};
use crate::numeric::{coefficient_of_variation, compensated_sum, dot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesirabilityVector {
    values: Vec<f64>,
    /// Normalization of the likedness vector used in the denominator.
    basis: Normalization,
}

impl DesirabilityVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn basis(&self) -> Normalization {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn log_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.ln()).collect()
    }
}

impl std::ops::Index<usize> for DesirabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

fn log_geometric_mean_incoming(graph: &Graph, rates: &RateMatrix, i: usize) -> Result<f64> {
    let degree = graph.degree(i);
    if degree == 0 {
        return Err(Error::DegenerateGraph { vertex: i });
    }
    let row = rates.row(i);
    if row.len() != degree {
        let j = graph
            .neighbors(i)
            .iter()
            .copied()
            .find(|&j| rates.get(i, j) == 0.0)
            .unwrap_or(0);
        return Err(Error::MissingRate { i, j });
    }
    Ok(compensated_sum(row.iter().map(|&(_, r)| r.ln())) / degree as f64)
}

/// Geometric mean of the rates at which `i` is liked, computed in log space.
pub fn geometric_mean_incoming(graph: &Graph, rates: &RateMatrix, i: usize) -> Result<f64> {
    log_geometric_mean_incoming(graph, rates, i).map(f64::exp)
}

fn check_dims(graph: &Graph, rates: &RateMatrix, likedness: &LikednessVector) -> Result<()> {
    for found in [rates.dim(), likedness.len()] {
        if found != graph.order() {
            return Err(Error::DimensionMismatch {
                expected: graph.order(),
                found,
            });
        }
    }
    Ok(())
}

fn log_desirability(
    graph: &Graph,
    rates: &RateMatrix,
    likedness: &LikednessVector,
) -> Result<Vec<f64>> {
    check_dims(graph, rates, likedness)?;
    (0..graph.order())
        .map(|i| {
            let log_gm = log_geometric_mean_incoming(graph, rates, i)?;
            let neighbor_mean = sigma(graph, likedness, i)? / graph.degree(i) as f64;
            Ok(log_gm - neighbor_mean.ln())
        })
        .collect()
}

/// `NDᵢ = GMᵢ / (σᵢ / δᵢ)` against the given likedness vector.
pub fn neighbor_desirability(
    graph: &Graph,
    rates: &RateMatrix,
    likedness: &LikednessVector,
) -> Result<DesirabilityVector> {
    let logs = log_desirability(graph, rates, likedness)?;
    Ok(DesirabilityVector {
        values: logs.into_iter().map(f64::exp).collect(),
        basis: likedness.normalization(),
    })
}

/// Stationary-weighted mean of `log ND`.
pub fn log_drift(
    graph: &Graph,
    rates: &RateMatrix,
    likedness: &LikednessVector,
    stationary: &StationaryVector,
) -> Result<f64> {
    let logs = log_desirability(graph, rates, likedness)?;
    Ok(dot(stationary.values(), &logs))
}

/// Rescales `L` so that `Σⱼ pⱼ log NDⱼ = 0`.
///
/// Scaling `L` by `c` shifts every `log NDⱼ` by `−log c`, so the factor is
/// `c = exp(Σⱼ pⱼ log NDⱼ(L))`.
pub fn log_stationary_normalize(
    graph: &Graph,
    rates: &RateMatrix,
    likedness: &LikednessVector,
    stationary: &StationaryVector,
) -> Result<LikednessVector> {
    let drift = log_drift(graph, rates, likedness, stationary)?;
    Ok(likedness.rescaled(drift.exp(), Normalization::LogStationary))
}

/// Per-vertex gap `log AM − log GM` of `{Rᵢⱼ Lⱼ : j ~ i}`. Non-negative and
/// invariant under rescaling `L`.
pub fn am_gm_gap(
    graph: &Graph,
    rates: &RateMatrix,
    likedness: &LikednessVector,
) -> Result<Vec<f64>> {
    check_dims(graph, rates, likedness)?;
    rates.require_full_support(graph)?;
    let l = likedness.values();
    (0..graph.order())
        .map(|i| {
            let degree = graph.degree(i);
            if degree == 0 {
                return Err(Error::DegenerateGraph { vertex: i });
            }
            let terms: Vec<f64> = rates.row(i).iter().map(|&(j, r)| r * l[j]).collect();
            let log_am = (compensated_sum(terms.iter().copied()) / degree as f64).ln();
            let log_gm = compensated_sum(terms.iter().map(|t| t.ln())) / degree as f64;
            Ok((log_am - log_gm).max(0.0))
        })
        .collect()
}

/// One vertex of the truncated product formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEntry {
    pub vertex: usize,
    pub truncation: usize,
    /// `Σⱼ Wᵢⱼ log NDⱼ` with `W = Σ_{t=0}^{n} Pᵗ`.
    pub log_value: f64,
    pub value: f64,
    /// `value / Lᵢ` against the basis vector.
    pub ratio: f64,
}

/// Truncated product `Πⱼ NDⱼ^(Σ_{t≤n} Pᵗ)ᵢⱼ` for vertex `i`.
///
/// `basis` must carry the log-stationary normalization; desirability is
/// evaluated against it.
pub fn product_formula_eval(
    graph: &Graph,
    rates: &RateMatrix,
    basis: &LikednessVector,
    i: usize,
    n: usize,
) -> Result<ProductEntry> {
    if basis.normalization() != Normalization::LogStationary {
        return Err(Error::InvalidParams(format!(
            "product formula needs a log-stationary basis, got {:?}",
            basis.normalization()
        )));
    }
    graph.require_walkable()?;
    if i >= graph.order() {
        return Err(Error::InvalidParams(format!("vertex {i} out of range")));
    }
    let logs = log_desirability(graph, rates, basis)?;
    let p = TransitionMatrix::new(graph)?;
    Ok(product_entry(&p, &logs, basis.values(), i, n))
}

fn product_entry(
    p: &TransitionMatrix,
    log_bases: &[f64],
    likedness: &[f64],
    i: usize,
    n: usize,
) -> ProductEntry {
    let weights = power_sum_row_with(p, i, n);
    let log_value = dot(&weights, log_bases);
    let value = log_value.exp();
    ProductEntry {
        vertex: i,
        truncation: n,
        log_value,
        value,
        ratio: (log_value - likedness[i].ln()).exp(),
    }
}

/// Diagnostics for the product formula at one truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEvalReport {
    pub truncation: usize,
    /// Truncated products under the log-stationary basis.
    pub products: Vec<f64>,
    /// Products divided by the log-stationary likedness vector.
    pub ratios: Vec<f64>,
    /// Coefficient of variation of `ratios`; zero when the product is a
    /// constant multiple of the solved vector.
    pub ratio_cv: f64,
    /// `Σⱼ pⱼ log NDⱼ` with desirability taken against the `p · L = 1`
    /// vector.
    pub drift: f64,
    /// Factor taking the `p · L = 1` vector to the log-stationary one.
    pub log_stationary_scale: f64,
    /// Ratio CV when each base also carries its AM–GM gap.
    pub gap_corrected_ratio_cv: f64,
}

/// Evaluates the truncated product formula at every vertex.
///
/// `likedness` may carry any normalization; it is rescaled internally.
pub fn product_formula_report(
    graph: &Graph,
    rates: &RateMatrix,
    likedness: &LikednessVector,
    stationary: &StationaryVector,
    n: usize,
) -> Result<ProductEvalReport> {
    graph.require_walkable()?;
    check_dims(graph, rates, likedness)?;
    if stationary.len() != graph.order() {
        return Err(Error::DimensionMismatch {
            expected: graph.order(),
            found: stationary.len(),
        });
    }
    let p_unit = crate::likedness::normalize_unique(likedness, stationary)?;
    let drift = log_drift(graph, rates, &p_unit, stationary)?;
    let basis = p_unit.rescaled(drift.exp(), Normalization::LogStationary);
    let logs = log_desirability(graph, rates, &basis)?;

    let gap = am_gm_gap(graph, rates, &basis)?;
    let mut corrected: Vec<f64> = logs.iter().zip(&gap).map(|(a, b)| a + b).collect();
    let corrected_drift = dot(stationary.values(), &corrected);
    corrected.iter_mut().for_each(|v| *v -= corrected_drift);

    let walk = TransitionMatrix::new(graph)?;
    let entries: Vec<(ProductEntry, ProductEntry)> = (0..graph.order())
        .into_par_iter()
        .map(|i| {
            (
                product_entry(&walk, &logs, basis.values(), i, n),
                product_entry(&walk, &corrected, basis.values(), i, n),
            )
        })
        .collect();
    let products: Vec<f64> = entries.iter().map(|(e, _)| e.value).collect();
    let ratios: Vec<f64> = entries.iter().map(|(e, _)| e.ratio).collect();
    let corrected_ratios: Vec<f64> = entries.iter().map(|(_, c)| c.ratio).collect();
    Ok(ProductEvalReport {
        truncation: n,
        ratio_cv: coefficient_of_variation(&ratios),
        gap_corrected_ratio_cv: coefficient_of_variation(&corrected_ratios),
        products,
        ratios,
        drift,
        log_stationary_scale: drift.exp(),
    })
}
