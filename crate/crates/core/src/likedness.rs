//! Like-rate matrices and likedness centrality.
//!
//! A likedness vector `L` is any positive vector with
//!
//! ```text
//! Σⱼ (Gᵢⱼ Lᵢ − Rᵢⱼ) Lⱼ = 0    for every vertex i
//! ```
//!
//! where `Rᵢⱼ` is the rate at which `j` likes `i`. Writing
//! `σᵢ = Σⱼ Gᵢⱼ Lⱼ` this is the fixed point `Lᵢ = (Σⱼ Rᵢⱼ Lⱼ) / σᵢ`, which
//! [`solve`] finds by damped iteration. The map is homogeneous of degree
//! zero in `L`, so the fixed point carries the scale of `R`; the unique
//! likedness vector divides out that scale with the stationary
//! distribution of the walk ([`normalize_unique`]).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::markov::StationaryVector;
use crate::numeric::{compensated_sum, dot};

/// Sparse positive like-rates on ordered edge pairs.
///
/// `get(i, j)` is the rate at which `j` likes `i`. Pairs without a stored
/// rate have rate zero; every stored pair is an edge of the graph the
/// matrix was built against.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl RateMatrix {
    /// Builds a rate matrix from `(i, j, rate)` triples. Rejects pairs that
    /// are not edges of `graph` and rates that are not positive and finite.
    /// A repeated pair keeps the last rate.
    pub fn new<I>(graph: &Graph, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); graph.order()];
        for (i, j, rate) in entries {
            if i >= graph.order() || !graph.has_edge(i, j) {
                return Err(Error::RateOffEdge { i, j });
            }
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidRate { i, j, rate });
            }
            let row = &mut rows[i];
            match row.iter_mut().find(|(k, _)| *k == j) {
                Some(slot) => slot.1 = rate,
                None => row.push((j, rate)),
            }
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Ok(RateMatrix { rows })
    }

    /// Rate on every ordered edge pair from `f(i, j)`.
    pub fn from_fn<F>(graph: &Graph, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut entries = Vec::with_capacity(2 * graph.edge_count());
        for i in 0..graph.order() {
            for &j in graph.neighbors(i) {
                entries.push((i, j, f(i, j)));
            }
        }
        Self::new(graph, entries)
    }

    pub fn uniform(graph: &Graph, rate: f64) -> Result<Self> {
        Self::from_fn(graph, |_, _| rate)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of stored ordered pairs.
    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .map_or(0.0, |idx| self.rows[i][idx].1)
    }

    /// Incoming rates of `i`, sorted by liker.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, r)| (i, j, r)))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RateMatrix {
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|&(j, r)| (j, r * factor)).collect())
                .collect(),
        }
    }

    /// Relabels vertex `v` as `perm[v]`; pair with [`Graph::permuted`].
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut rows = vec![Vec::new(); self.dim()];
        for (i, j, r) in self.iter() {
            rows[perm[i]].push((perm[j], r));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        RateMatrix { rows }
    }

    /// Errors unless every ordered edge pair of `graph` carries a rate.
    pub fn require_full_support(&self, graph: &Graph) -> Result<()> {
        self.require_dim(graph)?;
        for i in 0..graph.order() {
            let row = &self.rows[i];
            if row.len() != graph.degree(i) {
                let missing = graph
                    .neighbors(i)
                    .iter()
                    .find(|&&j| row.binary_search_by_key(&j, |&(k, _)| k).is_err())
                    .copied()
                    .unwrap_or(0);
                return Err(Error::MissingRate { i, j: missing });
            }
        }
        Ok(())
    }

    fn require_dim(&self, graph: &Graph) -> Result<()> {
        if self.dim() != graph.order() {
            return Err(Error::DimensionMismatch {
                expected: graph.order(),
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// Reads the `i,j,rate` CSV format and checks it against `graph`.
    pub fn read_csv<R: Read>(graph: &Graph, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["i", "j", "rate"] {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header \"i,j,rate\", got {:?}", headers.as_slice()),
            });
        }
        let mut entries = Vec::new();
        for record in rdr.deserialize::<(usize, usize, f64)>() {
            entries.push(record?);
        }
        Self::new(graph, entries)
    }

    /// Writes the `i,j,rate` CSV format, rows sorted by `(i, j)`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["i", "j", "rate"])?;
        for (i, j, r) in self.iter() {
            wtr.serialize((i, j, r))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Which scaling a likedness vector carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Fixed point as produced by the solver, on the scale of the rates.
    Raw,
    /// Scaled so that `p · L = 1`.
    PUnit,
    /// Scaled so that `Σⱼ pⱼ log NDⱼ = 0`.
    LogStationary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikednessVector {
    values: Vec<f64>,
    normalization: Normalization,
}

impl LikednessVector {
    /// Errors unless every value is positive and finite.
    pub fn new(values: Vec<f64>, normalization: Normalization) -> Result<Self> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::Numerical(format!(
                "likedness of vertex {i} must be positive, got {v}"
            )));
        }
        Ok(LikednessVector {
            values,
            normalization,
        })
    }

    pub fn raw(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Normalization::Raw)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn rescaled(&self, factor: f64, normalization: Normalization) -> Self {
        LikednessVector {
            values: self.values.iter().map(|v| v * factor).collect(),
            normalization,
        }
    }
}

impl std::ops::Index<usize> for LikednessVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stop once the largest relative residual is at most this.
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the new image in `L ← (1 − α) L + α F(L)`.
    pub damping: f64,
    /// Start vector; uniform ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 100_000,
            damping: 0.5,
            initial: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams("solver tolerance must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub likedness: LikednessVector,
    pub iterations: usize,
    /// Largest absolute relative residual at the returned vector.
    pub residual: f64,
}

fn neighbor_sum(graph: &Graph, values: &[f64], i: usize) -> f64 {
    compensated_sum(graph.neighbors(i).iter().map(|&j| values[j]))
}

/// `σᵢ`: sum of likedness over the neighbors of `i`.
pub fn sigma(graph: &Graph, likedness: &LikednessVector, i: usize) -> Result<f64> {
    if graph.degree(i) == 0 {
        return Err(Error::DegenerateGraph { vertex: i });
    }
    Ok(neighbor_sum(graph, likedness.values(), i))
}

fn weighted_incoming(rates: &RateMatrix, values: &[f64], i: usize) -> f64 {
    compensated_sum(rates.row(i).iter().map(|&(j, r)| r * values[j]))
}

/// One application of the fixed-point map, `Fᵢ(L) = (Σⱼ Rᵢⱼ Lⱼ) / σᵢ(L)`.
pub fn update_map(graph: &Graph, rates: &RateMatrix, values: &[f64]) -> Vec<f64> {
    (0..graph.order())
        .map(|i| weighted_incoming(rates, values, i) / neighbor_sum(graph, values, i))
        .collect()
}

/// Per-vertex residual `Σⱼ (Gᵢⱼ Lᵢ − Rᵢⱼ) Lⱼ / (Lᵢ σᵢ)`.
///
/// Signed; it equals `1 − Fᵢ(L) / Lᵢ`.
pub fn residual(graph: &Graph, rates: &RateMatrix, likedness: &LikednessVector) -> Vec<f64> {
    residual_values(graph, rates, likedness.values())
}

fn residual_values(graph: &Graph, rates: &RateMatrix, values: &[f64]) -> Vec<f64> {
    (0..graph.order())
        .map(|i| {
            let sigma = neighbor_sum(graph, values, i);
            let lhs = values[i] * sigma - weighted_incoming(rates, values, i);
            lhs / (values[i] * sigma)
        })
        .collect()
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Damped fixed-point iteration for a likedness vector.
///
/// Returns a raw (unnormalized) vector whose relative residual is at most
/// `cfg.tol`.
pub fn solve(graph: &Graph, rates: &RateMatrix, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    graph.require_walkable()?;
    rates.require_full_support(graph)?;
    let n = graph.order();
    let mut current = match &cfg.initial {
        Some(start) => {
            if start.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: start.len(),
                });
            }
            LikednessVector::raw(start.clone())?.into_values()
        }
        None => vec![1.0; n],
    };
    let alpha = cfg.damping;
    let mut image = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 0..=cfg.max_iter {
        for (i, slot) in image.iter_mut().enumerate() {
            *slot = weighted_incoming(rates, &current, i) / neighbor_sum(graph, &current, i);
        }
        residual = current
            .iter()
            .zip(&image)
            .fold(0.0f64, |m, (l, f)| m.max((1.0 - f / l).abs()));
        if residual.is_nan() {
            return Err(Error::Numerical("solver residual became NaN".into()));
        }
        if residual <= cfg.tol {
            let mut residual = max_abs(&residual_values(graph, rates, &current));
            // the undamped image is often the sharper of the two
            if image.iter().all(|v| *v > 0.0 && v.is_finite()) {
                let image_residual = max_abs(&residual_values(graph, rates, &image));
                if image_residual < residual {
                    residual = image_residual;
                    std::mem::swap(&mut current, &mut image);
                }
            }
            return Ok(Solution {
                likedness: LikednessVector::raw(current)?,
                iterations: iteration,
                residual,
            });
        }
        if iteration == cfg.max_iter {
            break;
        }
        for (l, f) in current.iter_mut().zip(&image) {
            *l = (1.0 - alpha) * *l + alpha * f;
            if !(*l > 0.0 && l.is_finite()) {
                return Err(Error::Numerical(format!(
                    "non-positive iterate {l} at iteration {iteration}"
                )));
            }
        }
    }
    Err(Error::Convergence {
        what: "likedness solve",
        iterations: cfg.max_iter,
        residual,
    })
}

/// Unique likedness `L / (p · L)`.
pub fn normalize_unique(
    likedness: &LikednessVector,
    stationary: &StationaryVector,
) -> Result<LikednessVector> {
    if likedness.len() != stationary.len() {
        return Err(Error::DimensionMismatch {
            expected: stationary.len(),
            found: likedness.len(),
        });
    }
    let scale = dot(stationary.values(), likedness.values());
    Ok(likedness.rescaled(1.0 / scale, Normalization::PUnit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::stationary_closed_form;

    fn k2_rates() -> (Graph, RateMatrix) {
        let g = Graph::complete(2);
        let r = RateMatrix::new(&g, [(0, 1, 3.0), (1, 0, 5.0)]).unwrap();
        (g, r)
    }

    #[test]
    fn sigma_examples() {
        let g = Graph::complete(2);
        let l = LikednessVector::raw(vec![3.0, 5.0]).unwrap();
        assert_eq!(sigma(&g, &l, 0).unwrap(), 5.0);
        let g3 = Graph::complete(3);
        let ones = LikednessVector::raw(vec![1.0; 3]).unwrap();
        for i in 0..3 {
            assert_eq!(sigma(&g3, &ones, i).unwrap(), 2.0);
        }
        let star = Graph::star(4);
        let l = LikednessVector::raw(vec![9.0, 1.5, 2.0, 4.0]).unwrap();
        assert_eq!(sigma(&star, &l, 0).unwrap(), 7.5);
    }

    #[test]
    fn sigma_of_isolated_vertex_errors() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let l = LikednessVector::raw(vec![1.0; 3]).unwrap();
        assert!(matches!(
            sigma(&g, &l, 2),
            Err(Error::DegenerateGraph { vertex: 2 })
        ));
    }

    #[test]
    fn two_node_solution_is_incoming_rates() {
        let (g, r) = k2_rates();
        let sol = solve(&g, &r, &SolverConfig::default()).unwrap();
        assert!((sol.likedness[0] - 3.0).abs() < 1e-12);
        assert!((sol.likedness[1] - 5.0).abs() < 1e-12);
        assert_eq!(sol.likedness.normalization(), Normalization::Raw);
    }

    #[test]
    fn uniform_triangle() {
        let g = Graph::complete(3);
        let r = RateMatrix::uniform(&g, 2.5).unwrap();
        let sol = solve(&g, &r, &SolverConfig::default()).unwrap();
        for &v in sol.likedness.values() {
            assert!((v - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn unique_normalization() {
        let (g, _) = k2_rates();
        let p = stationary_closed_form(&g).unwrap();
        let l = LikednessVector::raw(vec![3.0, 5.0]).unwrap();
        let star = normalize_unique(&l, &p).unwrap();
        assert_eq!(star.values(), &[0.75, 1.25]);
        assert_eq!(star.normalization(), Normalization::PUnit);
        let again = normalize_unique(&star, &p).unwrap();
        assert_eq!(again.values(), star.values());
        let seven = LikednessVector::raw(vec![21.0, 35.0]).unwrap();
        assert_eq!(normalize_unique(&seven, &p).unwrap().values(), star.values());
    }

    #[test]
    fn residual_examples() {
        let (g, r) = k2_rates();
        let l = LikednessVector::raw(vec![3.0, 5.0]).unwrap();
        assert_eq!(residual(&g, &r, &l), vec![0.0, 0.0]);

        let g = Graph::complete(4);
        let r = RateMatrix::from_fn(&g, |i, j| 1.0 + (i * 4 + j) as f64 / 7.0).unwrap();
        let sol = solve(&g, &r, &SolverConfig::default()).unwrap();
        assert!(max_abs(&residual(&g, &r, &sol.likedness)) <= 1e-10);
        let mut bumped = sol.likedness.values().to_vec();
        bumped[2] *= 1.1;
        let res = residual(&g, &r, &LikednessVector::raw(bumped).unwrap());
        assert!(res[2].abs() > 0.05);
    }

    #[test]
    fn rates_off_edges_are_rejected() {
        let g = Graph::path(3);
        assert!(matches!(
            RateMatrix::new(&g, [(0, 2, 1.0)]),
            Err(Error::RateOffEdge { i: 0, j: 2 })
        ));
        assert!(matches!(
            RateMatrix::new(&g, [(0, 1, 0.0)]),
            Err(Error::InvalidRate { .. })
        ));
        assert!(matches!(
            RateMatrix::new(&g, [(0, 1, f64::NAN)]),
            Err(Error::InvalidRate { .. })
        ));
    }

    #[test]
    fn missing_rate_blocks_solve() {
        let g = Graph::path(3);
        let r = RateMatrix::new(&g, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(matches!(
            solve(&g, &r, &SolverConfig::default()),
            Err(Error::MissingRate { i: 2, j: 1 })
        ));
    }

    #[test]
    fn bad_config_is_rejected() {
        let (g, r) = k2_rates();
        let cfg = SolverConfig {
            damping: 0.0,
            ..SolverConfig::default()
        };
        assert!(matches!(solve(&g, &r, &cfg), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let g = Graph::star(5);
        let r = RateMatrix::from_fn(&g, |i, j| 1.0 + i as f64 + 3.0 * j as f64).unwrap();
        let cfg = SolverConfig {
            max_iter: 2,
            ..SolverConfig::default()
        };
        match solve(&g, &r, &cfg) {
            Err(Error::Convergence {
                iterations,
                residual,
                ..
            }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn update_map_is_scale_free() {
        let g = Graph::cycle(5);
        let r = RateMatrix::from_fn(&g, |i, j| 0.5 + ((i + 2 * j) % 3) as f64).unwrap();
        let l = vec![0.3, 1.2, 2.0, 0.7, 1.1];
        let scaled: Vec<f64> = l.iter().map(|v| v * 13.0).collect();
        for (a, b) in update_map(&g, &r, &l).iter().zip(update_map(&g, &r, &scaled)) {
            assert!((a - b).abs() <= 1e-14 * a.abs());
        }
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let (g, r) = k2_rates();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "i,j,rate\n0,1,3.0\n1,0,5.0\n");
        assert_eq!(RateMatrix::read_csv(&g, buf.as_slice()).unwrap(), r);

        let p3 = Graph::path(3);
        let bad = "i,j,rate\n0,2,1.5\n";
        assert!(matches!(
            RateMatrix::read_csv(&p3, bad.as_bytes()),
            Err(Error::RateOffEdge { i: 0, j: 2 })
        ));
        assert!(RateMatrix::read_csv(&p3, "a,b,c\n0,1,1\n".as_bytes()).is_err());
    }
}
