//! Simple undirected graphs with contiguous `0..n` vertex ids.
//!
//! Vertices are numbered from zero everywhere in this crate. A graph of
//! order `n` whose vertices are written `1..=n` elsewhere maps vertex `k`
//! to id `k - 1`.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable simple undirected graph.
///
/// Edges are kept canonical (`u < v`, sorted) and each vertex carries a
/// sorted neighbor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// A broken graph invariant found by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { vertex: usize },
    OutOfRange { edge: (usize, usize), order: usize },
    DuplicateEdge { edge: (usize, usize) },
    AsymmetricAdjacency { from: usize, to: usize },
    DegreeMismatch { vertex: usize, degree: usize, incident: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::OutOfRange { edge, order } => {
                write!(f, "edge ({}, {}) out of range for order {order}", edge.0, edge.1)
            }
            Violation::DuplicateEdge { edge } => {
                write!(f, "duplicate edge ({}, {})", edge.0, edge.1)
            }
            Violation::AsymmetricAdjacency { from, to } => {
                write!(f, "adjacency {from} -> {to} has no reverse entry")
            }
            Violation::DegreeMismatch {
                vertex,
                degree,
                incident,
            } => write!(
                f,
                "vertex {vertex} has degree {degree} but {incident} incident edges"
            ),
        }
    }
}

impl Graph {
    /// Builds a graph from an edge list. Both orientations of an edge may
    /// appear; they collapse to a single undirected edge. Self-loops and
    /// out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for order {n}"
                )));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self::from_edges_unchecked(n, set.into_iter().collect()))
    }

    /// Stores `edges` verbatim, without canonicalization or checks.
    ///
    /// Out-of-range endpoints are kept in the edge list but left out of the
    /// adjacency. Use [`Graph::validate`] to inspect the result.
    pub fn from_edges_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u < n && v < n {
                adjacency[u].push(v);
                if u != v {
                    adjacency[v].push(u);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path graph is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least three vertices");
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle graph is simple")
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (0, v))).expect("star graph is simple")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Returns the first isolated vertex, if any.
    pub fn isolated_vertex(&self) -> Option<usize> {
        (0..self.n).find(|&v| self.adjacency[v].is_empty())
    }

    /// Lists every broken invariant. An empty list means the graph is a
    /// valid simple undirected graph.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        let mut incident = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            if u >= self.n || v >= self.n {
                violations.push(Violation::OutOfRange {
                    edge: (u, v),
                    order: self.n,
                });
                continue;
            }
            if u == v {
                violations.push(Violation::SelfLoop { vertex: u });
                continue;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                violations.push(Violation::DuplicateEdge { edge: (u, v) });
            }
            incident[u] += 1;
            incident[v] += 1;
        }
        for u in 0..self.n {
            for &v in &self.adjacency[u] {
                if u != v && self.adjacency[v].binary_search(&u).is_err() {
                    violations.push(Violation::AsymmetricAdjacency { from: u, to: v });
                }
            }
            let degree = self.adjacency[u].iter().filter(|&&v| v != u).count();
            if degree != incident[u] {
                violations.push(Violation::DegreeMismatch {
                    vertex: u,
                    degree,
                    incident: incident[u],
                });
            }
        }
        violations
    }

    /// True iff a breadth-first traversal from vertex 0 reaches every vertex.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Hop distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap() + 1;
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Errors unless the graph is connected and has no isolated vertex.
    pub fn require_walkable(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if let Some(vertex) = self.isolated_vertex() {
            return Err(Error::DegenerateGraph { vertex });
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_edges(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("permutation preserves simplicity")
    }
}

/// Parameters of the Barabási–Albert growth process.
///
/// Growth starts from the complete graph on `m0` vertices; each of the `t`
/// added vertices attaches `m` edges to distinct existing vertices drawn
/// with probability proportional to their current degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaParams {
    pub m0: usize,
    pub t: usize,
    pub m: usize,
    pub seed: u64,
}

impl BaParams {
    /// `m` defaults to `m0`.
    pub fn new(m0: usize, t: usize, seed: u64) -> Self {
        BaParams { m0, t, m: m0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m0 < 1 {
            return Err(Error::InvalidParams("m0 must be at least 1".into()));
        }
        if self.m > self.m0 {
            return Err(Error::InvalidParams(format!(
                "m ({}) must not exceed m0 ({})",
                self.m, self.m0
            )));
        }
        if self.m == 0 && self.t > 0 {
            return Err(Error::InvalidParams(
                "m must be at least 1 when vertices are added".into(),
            ));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.m0 + self.t
    }

    pub fn expected_edge_count(&self) -> usize {
        self.m0 * (self.m0 - 1) / 2 + self.m * self.t
    }
}

/// Grows a Barabási–Albert graph. Deterministic for a given seed.
pub fn generate_ba(params: &BaParams) -> Result<Graph> {
    params.validate()?;
    let n = params.order();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(params.expected_edge_count());
    for u in 0..params.m0 {
        for v in u + 1..params.m0 {
            edges.push((u, v));
        }
    }
    // Each vertex appears once per incident edge, so a uniform pick from
    // this pool is a degree-proportional pick.
    let mut endpoint_pool: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    let mut targets = Vec::with_capacity(params.m);
    for new_vertex in params.m0..n {
        targets.clear();
        while targets.len() < params.m {
            let candidate = if endpoint_pool.is_empty() {
                // only reachable from a single-vertex seed
                rng.random_range(0..new_vertex)
            } else {
                endpoint_pool[rng.random_range(0..endpoint_pool.len())]
            };
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
        for &target in &targets {
            edges.push((target, new_vertex));
            endpoint_pool.push(target);
            endpoint_pool.push(new_vertex);
        }
    }
    Graph::from_edges(n, edges)
}

/// Parses the plain-text edge-list format.
///
/// Each non-blank line that does not start with `#` holds two integer ids
/// `u v`. A `# nodes: N` comment fixes the order; otherwise it is one more
/// than the largest id seen.
pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("nodes:") {
                let n = value.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid node count {:?}", value.trim()),
                })?;
                declared = Some((n, line_no));
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected \"u v\", got {line:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid vertex id {s:?}"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                message: format!("self-loop at vertex {u}"),
            });
        }
        edges.push((u, v, line_no));
    }
    let n = match declared {
        Some((n, _)) => n,
        None => edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0),
    };
    if let Some(&(u, v, line)) = edges.iter().find(|&&(u, v, _)| u >= n || v >= n) {
        return Err(Error::Parse {
            line,
            message: format!("edge ({u}, {v}) out of range for {n} nodes"),
        });
    }
    Graph::from_edges(n, edges.into_iter().map(|(u, v, _)| (u, v)))
}

/// Canonical text form: a `# nodes: N` header followed by sorted `u v`
/// lines with `u < v`.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = format!("# nodes: {}\n", graph.order());
    let mut edges: Vec<_> = graph
        .edges()
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    edges.sort_unstable();
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_valid() {
        assert!(Graph::complete(3).validate().is_empty());
    }

    #[test]
    fn self_loop_is_reported() {
        let g = Graph::from_edges_unchecked(3, vec![(0, 1), (2, 2)]);
        assert_eq!(g.validate(), vec![Violation::SelfLoop { vertex: 2 }]);
    }

    #[test]
    fn reversed_pair_is_stored_once() {
        let g = Graph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.validate().is_empty());
    }

    #[test]
    fn unchecked_duplicates_and_range_are_reported() {
        let g = Graph::from_edges_unchecked(3, vec![(0, 1), (1, 0), (1, 5)]);
        let v = g.validate();
        assert!(v.contains(&Violation::DuplicateEdge { edge: (1, 0) }));
        assert!(v.contains(&Violation::OutOfRange {
            edge: (1, 5),
            order: 3
        }));
    }

    #[test]
    fn connectivity() {
        assert!(Graph::path(3).is_connected());
        let two_edges = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!two_edges.is_connected());
        assert!(Graph::from_edges(1, []).unwrap().is_connected());
    }

    #[test]
    fn ba_reference_size() {
        let g = generate_ba(&BaParams::new(5, 95, 42)).unwrap();
        assert_eq!(g.order(), 100);
        assert_eq!(g.edge_count(), 10 + 475);
        assert!(g.validate().is_empty());
        assert!(g.is_connected());
    }

    #[test]
    fn ba_without_growth_is_complete() {
        let g = generate_ba(&BaParams {
            m0: 3,
            t: 0,
            m: 1,
            seed: 9,
        })
        .unwrap();
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn ba_is_deterministic() {
        let p = BaParams::new(5, 95, 1234);
        assert_eq!(generate_ba(&p).unwrap(), generate_ba(&p).unwrap());
        let q = BaParams { seed: 1235, ..p };
        assert_ne!(generate_ba(&p).unwrap(), generate_ba(&q).unwrap());
    }

    #[test]
    fn ba_single_vertex_seed() {
        let g = generate_ba(&BaParams {
            m0: 1,
            t: 4,
            m: 1,
            seed: 3,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!(g.is_connected());
    }

    #[test]
    fn ba_rejects_bad_params() {
        let err = generate_ba(&BaParams {
            m0: 5,
            t: 10,
            m: 6,
            seed: 0,
        });
        assert!(matches!(err, Err(Error::InvalidParams(_))));
        assert!(BaParams { m0: 0, t: 0, m: 0, seed: 0 }.validate().is_err());
        assert!(BaParams { m0: 2, t: 1, m: 0, seed: 0 }.validate().is_err());
    }

    #[test]
    fn parse_path() {
        let g = read_edge_list("0 1\n1 2").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn parse_comments_and_header() {
        let g = read_edge_list("# nodes: 4\n\n# a comment\n2 1\n  0 1  \n").unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.degree(3), 0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match read_edge_list("0 1\n0 0\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match read_edge_list("0 1\n1 x\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match read_edge_list("0 1 2\n") {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match read_edge_list("# nodes: 3\n0 1\n1 3\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_edge_list("-1 2\n").is_err());
    }

    #[test]
    fn write_is_canonical() {
        let g = read_edge_list("2 1\n1 0\n0 2\n").unwrap();
        assert_eq!(write_edge_list(&g), "# nodes: 3\n0 1\n0 2\n1 2\n");
        assert_eq!(read_edge_list(&write_edge_list(&g)).unwrap(), g);
    }
}
