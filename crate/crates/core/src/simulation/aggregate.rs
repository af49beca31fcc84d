use serde::{Deserialize, Serialize};

use super::{BinSpec, EnsembleResult};
use crate::centrality::{centrality, Measure};
use crate::error::{Error, Result};
use crate::fitting::{fit, Family, FitResult, MIN_FIT_POINTS};
use crate::graph::Graph;
use crate::numeric::{compensated_sum, CompensatedSum};

/// Log-spaced bin edges. The last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogBins {
    pub edges: Vec<f64>,
}

impl LogBins {
    /// `count` bins spanning `[lo, hi]`. Collapses to one bin when
    /// `lo == hi`.
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
            return Err(Error::Domain(format!(
                "cannot log-bin [{lo}, {hi}] into {count} bins"
            )));
        }
        if lo == hi {
            return Ok(LogBins {
                edges: vec![lo, hi],
            });
        }
        let (a, b) = (lo.ln(), hi.ln());
        let mut edges: Vec<f64> = (0..=count)
            .map(|k| (a + (b - a) * k as f64 / count as f64).exp())
            .collect();
        edges[0] = lo;
        edges[count] = hi;
        Ok(LogBins { edges })
    }

    pub fn spanning<I: IntoIterator<Item = f64>>(values: I, count: usize) -> Result<Self> {
        let (lo, hi) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        Self::new(lo, hi, count)
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: f64) -> Option<usize> {
        let last = *self.edges.last()?;
        if !(x >= self.edges[0] && x <= last) {
            return None;
        }
        if x == last {
            return Some(self.len() - 1);
        }
        // first edge strictly greater than x
        let upper = self.edges.partition_point(|&e| e <= x);
        Some(upper - 1)
    }

    pub fn bounds(&self, k: usize) -> (f64, f64) {
        (self.edges[k], self.edges[k + 1])
    }

    /// Geometric midpoint of bin `k`.
    pub fn center(&self, k: usize) -> f64 {
        (self.edges[k] * self.edges[k + 1]).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: LogBins,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn build(bins: LogBins, values: impl IntoIterator<Item = f64>) -> Self {
        let mut counts = vec![0; bins.len()];
        for v in values {
            if let Some(k) = bins.index(v) {
                counts[k] += 1;
            }
        }
        Histogram { bins, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Counts divided by the total.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// Absent for empty bins.
    pub mean_x: Option<f64>,
    pub mean_y: Option<f64>,
}

/// Mean of `y` within log-spaced bins of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedCurve {
    pub bins: Vec<CurveBin>,
}

impl BinnedCurve {
    pub fn build(bins: &LogBins, points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut sx = vec![CompensatedSum::new(); bins.len()];
        let mut sy = vec![CompensatedSum::new(); bins.len()];
        let mut counts = vec![0usize; bins.len()];
        for (x, y) in points {
            if let Some(k) = bins.index(x) {
                sx[k].add(x);
                sy[k].add(y);
                counts[k] += 1;
            }
        }
        let bins = (0..bins.len())
            .map(|k| {
                let (lo, hi) = bins.bounds(k);
                let c = counts[k];
                let mean = |s: &CompensatedSum| (c > 0).then(|| s.value() / c as f64);
                CurveBin {
                    lo,
                    hi,
                    count: c,
                    mean_x: mean(&sx[k]),
                    mean_y: mean(&sy[k]),
                }
            })
            .collect();
        BinnedCurve { bins }
    }

    /// `(mean_x, mean_y)` of bins holding at least `min_count` observations.
    pub fn points(&self, min_count: usize) -> Vec<(f64, f64)> {
        self.bins
            .iter()
            .filter(|b| b.count >= min_count.max(1))
            .filter_map(|b| Some((b.mean_x?, b.mean_y?)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_desirability: Option<f64>,
    /// Mean over observations of the arithmetic mean of neighbors' ND.
    pub mean_neighbor_desirability: Option<f64>,
    /// Per neighbor-ND bin: share of this bin's neighbors falling there
    /// divided by the global share. `None` where the global share is zero.
    pub representation: Option<Vec<Option<f64>>>,
    /// Bin centers averaged with `representation` as weights.
    pub scaled_neighbor_desirability: Option<f64>,
}

/// Own desirability against the desirability of one's neighbors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborCurve {
    pub bins: Vec<NeighborBin>,
    /// Pearson correlation of own ND with mean neighbor ND over all
    /// observations. `None` if either side is constant.
    pub correlation: Option<f64>,
}

impl NeighborCurve {
    pub fn points(&self, min_count: usize) -> Vec<(f64, f64)> {
        self.bins
            .iter()
            .filter(|b| b.count >= min_count.max(1))
            .filter_map(|b| Some((b.mean_desirability?, b.mean_neighbor_desirability?)))
            .collect()
    }
}

fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    let n = pairs.len() as f64;
    let mx = compensated_sum(pairs.iter().map(|p| p.0)) / n;
    let my = compensated_sum(pairs.iter().map(|p| p.1)) / n;
    let sxy = compensated_sum(pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    let sxx = compensated_sum(pairs.iter().map(|p| (p.0 - mx).powi(2)));
    let syy = compensated_sum(pairs.iter().map(|p| (p.1 - my).powi(2)));
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Bins every `(node, ensemble)` observation by its own desirability and
/// summarizes the desirability of that node's neighbors in the same
/// ensemble. `bins` is used both for own and neighbor desirability.
pub fn neighbor_pair_curve(
    graph: &Graph,
    results: &[EnsembleResult],
    bins: &LogBins,
) -> Result<NeighborCurve> {
    if results.is_empty() {
        return Err(Error::InvalidParams("no ensembles to summarize".into()));
    }
    let k = bins.len();
    let global = Histogram::build(
        bins.clone(),
        results.iter().flat_map(|r| r.desirability.iter().copied()),
    );
    let global_freq = global.frequencies();

    let mut own_sum = vec![CompensatedSum::new(); k];
    let mut nb_sum = vec![CompensatedSum::new(); k];
    let mut counts = vec![0usize; k];
    let mut conditional = vec![vec![0usize; k]; k];
    let mut pairs = Vec::with_capacity(results.len() * graph.order());
    for r in results {
        for v in 0..graph.order() {
            let nbrs = graph.neighbors(v);
            let own = r.desirability[v];
            let nb_mean =
                compensated_sum(nbrs.iter().map(|&u| r.desirability[u])) / nbrs.len() as f64;
            pairs.push((own, nb_mean));
            let Some(b) = bins.index(own) else { continue };
            own_sum[b].add(own);
            nb_sum[b].add(nb_mean);
            counts[b] += 1;
            for &u in nbrs {
                if let Some(nb) = bins.index(r.desirability[u]) {
                    conditional[b][nb] += 1;
                }
            }
        }
    }

    let out = (0..k)
        .map(|b| {
            let (lo, hi) = bins.bounds(b);
            let c = counts[b];
            if c == 0 {
                return NeighborBin {
                    lo,
                    hi,
                    count: 0,
                    mean_desirability: None,
                    mean_neighbor_desirability: None,
                    representation: None,
                    scaled_neighbor_desirability: None,
                };
            }
            let total: usize = conditional[b].iter().sum();
            let representation: Vec<Option<f64>> = (0..k)
                .map(|nb| {
                    (global_freq[nb] > 0.0)
                        .then(|| conditional[b][nb] as f64 / total as f64 / global_freq[nb])
                })
                .collect();
            let weight = compensated_sum(representation.iter().flatten().copied());
            let scaled = (weight > 0.0).then(|| {
                compensated_sum(
                    representation
                        .iter()
                        .enumerate()
                        .filter_map(|(nb, r)| r.map(|r| r * bins.center(nb))),
                ) / weight
            });
            NeighborBin {
                lo,
                hi,
                count: c,
                mean_desirability: Some(own_sum[b].value() / c as f64),
                mean_neighbor_desirability: Some(nb_sum[b].value() / c as f64),
                representation: Some(representation),
                scaled_neighbor_desirability: scaled,
            }
        })
        .collect();
    Ok(NeighborCurve {
        bins: out,
        correlation: pearson(&pairs),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    pub node: usize,
    pub degree: f64,
    pub betweenness: f64,
    pub closeness: f64,
    pub eigenvector: f64,
    pub mean_likedness: f64,
    pub mean_desirability: f64,
}

impl NodeStats {
    pub fn centrality(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Degree => self.degree,
            Measure::Betweenness => self.betweenness,
            Measure::Closeness => self.closeness,
            Measure::Eigenvector => self.eigenvector,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityFit {
    pub measure: Measure,
    /// Nodes left out because the centrality is zero.
    pub dropped: usize,
    pub fit: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentFits {
    /// Power law of binned mean ND against binned mean likedness.
    pub desirability_vs_likedness: Option<FitResult>,
    /// Power law of per-node mean ND against each structural centrality.
    pub desirability_vs_centrality: Vec<CentralityFit>,
    /// Exponential of mean neighbor ND against own ND.
    pub neighbor_curve: Option<FitResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateDataset {
    pub accepted: usize,
    pub failed: usize,
    pub observations: usize,
    pub nodes: Vec<NodeStats>,
    pub likedness_curve: BinnedCurve,
    pub neighbor_curve: NeighborCurve,
    pub histogram: Histogram,
    pub fits: ExperimentFits,
}

impl AggregateDataset {
    pub fn centrality_fit(&self, measure: Measure) -> Option<&FitResult> {
        self.fits
            .desirability_vs_centrality
            .iter()
            .find(|c| c.measure == measure)
            .and_then(|c| c.fit.as_ref())
    }
}

fn try_fit(family: Family, points: &[(f64, f64)]) -> Option<FitResult> {
    if points.len() < MIN_FIT_POINTS {
        return None;
    }
    fit(family, points).ok()
}

/// Reduces ensemble results, in the order given, into curves, histograms
/// and fits.
pub fn aggregate(
    graph: &Graph,
    results: &[EnsembleResult],
    failed: usize,
    spec: &BinSpec,
) -> Result<AggregateDataset> {
    if results.is_empty() {
        return Err(Error::InvalidParams("no ensembles to aggregate".into()));
    }
    let n = graph.order();
    let count = results.len() as f64;
    let mean_of = |pick: fn(&EnsembleResult) -> &[f64], v: usize| {
        compensated_sum(results.iter().map(|r| pick(r)[v])) / count
    };
    let mut scores = Vec::new();
    for m in Measure::ALL {
        scores.push(centrality(graph, m)?.values);
    }
    let nodes: Vec<NodeStats> = (0..n)
        .map(|v| NodeStats {
            node: v,
            degree: scores[0][v],
            betweenness: scores[1][v],
            closeness: scores[2][v],
            eigenvector: scores[3][v],
            mean_likedness: mean_of(|r| &r.likedness, v),
            mean_desirability: mean_of(|r| &r.desirability, v),
        })
        .collect();

    let all_l = || results.iter().flat_map(|r| r.likedness.iter().copied());
    let all_nd = || results.iter().flat_map(|r| r.desirability.iter().copied());
    let l_bins = LogBins::spanning(all_l(), spec.count)?;
    let likedness_curve = BinnedCurve::build(
        &l_bins,
        results
            .iter()
            .flat_map(|r| r.likedness.iter().copied().zip(r.desirability.iter().copied())),
    );
    let nd_bins = LogBins::spanning(all_nd(), spec.count)?;
    let neighbor_curve = neighbor_pair_curve(graph, results, &nd_bins)?;
    let histogram = Histogram::build(nd_bins, all_nd());

    let desirability_vs_centrality = Measure::ALL
        .iter()
        .map(|&measure| {
            let points: Vec<(f64, f64)> = nodes
                .iter()
                .map(|s| (s.centrality(measure), s.mean_desirability))
                .filter(|&(x, _)| x > 0.0)
                .collect();
            CentralityFit {
                measure,
                dropped: n - points.len(),
                fit: try_fit(Family::Power, &points),
            }
        })
        .collect();
    let fits = ExperimentFits {
        desirability_vs_likedness: try_fit(
            Family::Power,
            &likedness_curve.points(spec.min_count),
        ),
        desirability_vs_centrality,
        neighbor_curve: try_fit(Family::Exponential, &neighbor_curve.points(spec.min_count)),
    };

    Ok(AggregateDataset {
        accepted: results.len(),
        failed,
        observations: results.len() * n,
        nodes,
        likedness_curve,
        neighbor_curve,
        histogram,
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(index: usize, likedness: Vec<f64>, desirability: Vec<f64>) -> EnsembleResult {
        EnsembleResult {
            index,
            likedness,
            desirability,
            iterations: 0,
            residual: 0.0,
        }
    }

    #[test]
    fn log_bins_cover_range() {
        let b = LogBins::new(0.1, 10.0, 2).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b.edges[1] - 1.0).abs() < 1e-12);
        assert_eq!(b.index(0.1), Some(0));
        assert_eq!(b.index(10.0), Some(1));
        assert_eq!(b.index(0.05), None);
        assert_eq!(b.index(10.5), None);
        let single = LogBins::new(2.0, 2.0, 5).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.index(2.0), Some(0));
        assert!(LogBins::new(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn histogram_counts_everything() {
        let values = [0.2, 0.5, 0.9, 1.3, 4.0, 4.0, 7.7];
        let bins = LogBins::spanning(values, 4).unwrap();
        let h = Histogram::build(bins, values);
        assert_eq!(h.total(), values.len());
    }

    #[test]
    fn two_node_neighbor_curve() {
        let g = Graph::complete(2);
        let r = result(0, vec![0.75, 1.25], vec![2.4, 20.0 / 3.0]);
        let bins = LogBins::spanning(r.desirability.iter().copied(), 3).unwrap();
        let curve = neighbor_pair_curve(&g, &[r], &bins).unwrap();
        let filled: Vec<_> = curve.bins.iter().filter(|b| b.count > 0).collect();
        assert_eq!(filled.len(), 2);
        assert_eq!(filled[0].mean_desirability, Some(2.4));
        assert_eq!(filled[0].mean_neighbor_desirability, Some(20.0 / 3.0));
        assert_eq!(filled[1].mean_neighbor_desirability, Some(2.4));
        assert!(curve.bins.iter().any(|b| b.count == 0 && b.mean_desirability.is_none()));
    }

    #[test]
    fn uniform_triangle_curve_is_one_point() {
        let g = Graph::complete(3);
        let r = result(0, vec![1.0; 3], vec![1.5; 3]);
        let bins = LogBins::spanning([1.5], 10).unwrap();
        let curve = neighbor_pair_curve(&g, &[r], &bins).unwrap();
        assert_eq!(curve.points(1), vec![(1.5, 1.5)]);
        assert_eq!(curve.correlation, None);
    }

    #[test]
    fn aggregate_bookkeeping() {
        let g = Graph::cycle(4);
        let results = vec![
            result(0, vec![1.0, 2.0, 0.5, 0.5], vec![1.0, 0.5, 2.0, 3.0]),
            result(1, vec![1.0, 1.0, 1.0, 1.0], vec![1.1, 0.9, 1.2, 0.8]),
        ];
        let agg = aggregate(&g, &results, 0, &BinSpec::default()).unwrap();
        assert_eq!(agg.observations, 8);
        assert_eq!(agg.histogram.total(), 8);
        assert_eq!(agg.likedness_curve.bins.iter().map(|b| b.count).sum::<usize>(), 8);
        assert_eq!(agg.nodes[1].mean_likedness, 1.5);
        assert_eq!(agg.nodes[3].mean_desirability, 1.9);
        assert_eq!(agg.nodes[0].betweenness, 0.5);
    }
}
