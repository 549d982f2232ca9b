//! Finite undirected multigraphs with loops and parallel edges.
//!
//! Edges are identified by their index in the edge list. That identity is what
//! ties the two sides of a plan together, so it is never derived from the
//! endpoints.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::perm::for_each_block_permutation;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::usage(format!(
                    "edge {i} = ({u}, {v}) has an endpoint outside 0..{vertex_count}"
                )));
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.edges[e];
        u == v
    }

    /// Number of edge ends at `v`; a loop contributes two.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.vertex_count {
            return Err(Error::usage(format!(
                "vertex {v} out of range (graph has {} vertices)",
                self.vertex_count
            )));
        }
        Ok(self
            .edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum())
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Degrees sorted non-increasingly. Fails on graphs with isolated vertices
    /// or no edges, whose degree sequences are outside the model.
    pub fn degree_sequence(&self) -> Result<DegreeSequence> {
        if self.edges.is_empty() {
            return Err(Error::usage("degree sequence of an edgeless graph"));
        }
        let entries = self.degrees().into_iter().map(|d| d as u32).collect();
        DegreeSequence::new(entries)
    }

    /// Incident edge indices per vertex; a loop is listed once.
    pub fn incidence_lists(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            if u != v {
                inc[v].push(e);
            }
        }
        inc
    }

    /// Every vertex reachable from vertex 0. The empty graph counts as
    /// connected.
    pub fn is_connected(&self) -> bool {
        if self.vertex_count <= 1 {
            return true;
        }
        let mut sets = DisjointSets::new(self.vertex_count);
        for &(u, v) in &self.edges {
            sets.union(u, v);
        }
        sets.components() == 1
    }

    /// Connected once degree-0 vertices are dropped, and all degrees even.
    pub fn is_eulerian(&self) -> Result<bool> {
        if self.edges.is_empty() {
            return Err(Error::usage("Eulerian test on a graph without edges"));
        }
        let deg = self.degrees();
        if deg.iter().any(|d| d % 2 == 1) {
            return Ok(false);
        }
        let mut sets = DisjointSets::new(self.vertex_count);
        for &(u, v) in &self.edges {
            sets.union(u, v);
        }
        let isolated = deg.iter().filter(|&&d| d == 0).count();
        Ok(sets.components() - isolated == 1)
    }

    pub fn double_graph(&self) -> DoubleGraph {
        DoubleGraph::new(self.clone())
    }

    /// Incidence matrix row of edge `e` over the vertices, entries in {0,1,2}.
    pub fn incidence_row(&self, e: usize) -> Vec<u8> {
        let mut row = vec![0u8; self.vertex_count];
        let (u, v) = self.edges[e];
        row[u] += 1;
        row[v] += 1;
        row
    }

    /// Edge list relabelled so that it is identical for isomorphic graphs.
    ///
    /// Vertices are first ordered by non-increasing degree; the minimum is
    /// then taken over permutations inside each equal-degree block.
    pub fn canonical_edges(&self) -> Vec<(usize, usize)> {
        let deg = self.degrees();
        let mut order: Vec<usize> = (0..self.vertex_count).collect();
        order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
        let labels: Vec<usize> = order.iter().map(|&v| deg[v]).collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut position = vec![0usize; self.vertex_count];
        let mut buf = Vec::with_capacity(self.edges.len());
        for_each_block_permutation(&labels, |perm| {
            // slot i of the sorted order holds vertex order[perm[i]]
            for (slot, &p) in perm.iter().enumerate() {
                position[order[p]] = slot;
            }
            buf.clear();
            buf.extend(self.edges.iter().map(|&(u, v)| {
                let (a, b) = (position[u], position[v]);
                (a.min(b), a.max(b))
            }));
            buf.sort_unstable();
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        });
        best.unwrap_or_default()
    }

    /// Parses the `n ℓ` header followed by `ℓ` lines of `u v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::format(1, "missing `n l` header"))?;
        let nums = parse_usizes(header, hline)?;
        let [n, ell] = nums[..] else {
            return Err(Error::format(hline, "header must be `n l`"));
        };
        let mut edges = Vec::with_capacity(ell);
        for (line, l) in lines {
            let nums = parse_usizes(l, line)?;
            let [u, v] = nums[..] else {
                return Err(Error::format(line, "edge line must be `u v`"));
            };
            if u >= n || v >= n {
                return Err(Error::format(line, format!("endpoint out of range 0..{n}")));
            }
            edges.push((u, v));
        }
        if edges.len() != ell {
            return Err(Error::format(
                hline,
                format!("header announces {ell} edges, found {}", edges.len()),
            ));
        }
        Multigraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

fn parse_usizes(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::format(lineno, format!("expected a non-negative integer, got `{tok}`")))
        })
        .collect()
}

/// The double graph: every base edge `i` becomes the two copies `2i` and
/// `2i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleGraph {
    base: Multigraph,
    doubled: Multigraph,
}

impl DoubleGraph {
    pub fn new(base: Multigraph) -> Self {
        let edges = base.edges().iter().flat_map(|&e| [e, e]).collect();
        let doubled = Multigraph {
            vertex_count: base.vertex_count(),
            edges,
        };
        Self { base, doubled }
    }

    pub fn base(&self) -> &Multigraph {
        &self.base
    }

    pub fn graph(&self) -> &Multigraph {
        &self.doubled
    }

    pub fn copy_count(&self) -> usize {
        self.doubled.edge_count()
    }

    pub fn base_edge(copy: usize) -> usize {
        copy / 2
    }

    pub fn copies(edge: usize) -> [usize; 2] {
        [2 * edge, 2 * edge + 1]
    }
}

/// A graph cut out of a larger one, remembering where its vertices and edges
/// came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Multigraph,
    /// Original id of each local vertex.
    pub vertex_ids: Vec<usize>,
    /// Original edge index of each local edge (repeated for duplicated edges).
    pub edge_ids: Vec<usize>,
}

impl Subgraph {
    /// Builds the subgraph spanned by `(original edge id, u, v)` triples over
    /// the original vertex ids they mention.
    pub(crate) fn from_edges(edges: &[(usize, usize, usize)]) -> Self {
        let mut vertex_ids: Vec<usize> = edges.iter().flat_map(|&(_, u, v)| [u, v]).collect();
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        let local = |x: usize| vertex_ids.binary_search(&x).expect("vertex listed");
        let local_edges = edges.iter().map(|&(_, u, v)| (local(u), local(v))).collect();
        let edge_ids = edges.iter().map(|&(e, _, _)| e).collect();
        let graph = Multigraph {
            vertex_count: vertex_ids.len(),
            edges: local_edges,
        };
        Self {
            graph,
            vertex_ids,
            edge_ids,
        }
    }

    /// Degree of an original vertex inside the subgraph (0 if absent).
    pub fn degree_of(&self, original: usize) -> usize {
        match self.vertex_ids.binary_search(&original) {
            Ok(local) => self.graph.degree(local).unwrap_or(0),
            Err(_) => 0,
        }
    }

    pub fn is_eulerian(&self) -> Result<bool> {
        self.graph.is_eulerian()
    }
}

/// A degree sequence of a connected graph with at least one edge: positive
/// entries, even sum, stored non-increasingly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct DegreeSequence(Vec<u32>);

impl DegreeSequence {
    pub fn new(mut entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::usage("degree sequence must be non-empty"));
        }
        if entries.contains(&0) {
            return Err(Error::usage("degree sequence entries must be positive"));
        }
        if entries.iter().map(|&d| u64::from(d)).sum::<u64>() % 2 == 1 {
            return Err(Error::usage("degree sequence must have an even sum"));
        }
        entries.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&d| u64::from(d)).sum()
    }

    pub fn max(&self) -> u32 {
        self.0[0]
    }

    /// Compact form with `^` powers, e.g. `5,3,2^4`.
    pub fn to_power_notation(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            if j - i > 2 {
                parts.push(format!("{}^{}", self.0[i], j - i));
            } else {
                parts.extend(self.0[i..j].iter().map(u32::to_string));
            }
            i = j;
        }
        parts.join(",")
    }
}

/// Parses comma-separated entries with `x^k` shorthand for `k` copies of `x`,
/// in any order. Validation of the resulting multiset is left to the caller.
pub fn parse_entries(s: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || Error::usage(format!("bad sequence entry `{tok}`"));
        match tok.split_once('^') {
            Some((base, pow)) => {
                let base: u32 = base.trim().parse().map_err(|_| bad())?;
                let pow: usize = pow.trim().parse().map_err(|_| bad())?;
                out.extend(std::iter::repeat_n(base, pow));
            }
            None => out.push(tok.parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

impl FromStr for DegreeSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DegreeSequence::new(parse_entries(s)?)
    }
}

impl TryFrom<Vec<u32>> for DegreeSequence {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        DegreeSequence::new(v)
    }
}

impl From<DegreeSequence> for Vec<u32> {
    fn from(d: DegreeSequence) -> Self {
        d.0
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Multigraph {
        Multigraph::new(n, edges.to_vec()).unwrap()
    }

    // Fig. 1: loops a, b, c at u; d joins u and v; e is a loop at v.
    fn figure_one() -> Multigraph {
        g(2, &[(0, 0), (0, 0), (0, 0), (0, 1), (1, 1)])
    }

    #[test]
    fn loop_counts_twice() {
        assert_eq!(g(1, &[(0, 0)]).degree(0).unwrap(), 2);
    }

    #[test]
    fn two_vertices_with_loops_and_bridge() {
        let graph = g(2, &[(0, 0), (0, 1), (1, 1)]);
        assert_eq!(graph.degree(0).unwrap(), 3);
        let graph = g(2, &[(0, 0), (0, 0), (0, 1), (1, 1), (1, 1)]);
        assert_eq!(graph.degree(0).unwrap(), 5);
        assert_eq!(graph.degree(1).unwrap(), 5);
    }

    #[test]
    fn path_degrees() {
        assert_eq!(g(3, &[(0, 1), (1, 2)]).degrees(), vec![1, 2, 1]);
    }

    #[test]
    fn degree_out_of_range_is_usage_error() {
        assert!(matches!(g(1, &[(0, 0)]).degree(1), Err(Error::Usage(_))));
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(g(2, &[(0, 1), (0, 1)]).degree_sequence().unwrap().entries(), &[2, 2]);
        assert_eq!(figure_one().degree_sequence().unwrap().entries(), &[7, 3]);
        assert_eq!(g(1, &[(0, 0)]).degree_sequence().unwrap().entries(), &[2]);
    }

    #[test]
    fn connectivity() {
        assert!(!g(2, &[]).is_connected());
        assert!(g(2, &[(0, 1), (0, 1)]).is_connected());
        assert!(!g(2, &[(0, 0), (1, 1)]).is_connected());
        assert!(g(0, &[]).is_connected());
    }

    #[test]
    fn eulerian() {
        assert!(g(2, &[(0, 1), (0, 1)]).is_eulerian().unwrap());
        assert!(!g(2, &[(0, 1)]).is_eulerian().unwrap());
        assert!(!g(4, &[(0, 1), (0, 1), (2, 3), (2, 3)]).is_eulerian().unwrap());
        // isolated vertices are ignored
        assert!(g(3, &[(0, 0)]).is_eulerian().unwrap());
        assert!(matches!(g(2, &[]).is_eulerian(), Err(Error::Usage(_))));
    }

    #[test]
    fn doubling() {
        let d = g(2, &[(0, 1)]).double_graph();
        assert_eq!(d.graph().edges(), &[(0, 1), (0, 1)]);
        let d = g(1, &[(0, 0)]).double_graph();
        assert_eq!(d.graph().degree(0).unwrap(), 4);
        let d = figure_one().double_graph();
        assert_eq!(d.copy_count(), 10);
        assert_eq!(DoubleGraph::copies(3), [6, 7]);
        assert_eq!(DoubleGraph::base_edge(7), 3);
        assert_eq!(d.graph().degrees(), vec![14, 6]);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let text = "2 3\n0 0\n0 1\n1 1\n";
        let graph = Multigraph::parse(text).unwrap();
        assert_eq!(graph.to_text(), text);
        assert!(matches!(
            Multigraph::parse("2 2\n0 1\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            Multigraph::parse("2 1\n0 5\n"),
            Err(Error::Format { line: 2, .. })
        ));
    }

    #[test]
    fn sequence_parsing() {
        let d: DegreeSequence = "2^4,5,3".parse().unwrap();
        assert_eq!(d.entries(), &[5, 3, 2, 2, 2, 2]);
        assert_eq!(d.to_power_notation(), "5,3,2^4");
        assert!("3,0,1".parse::<DegreeSequence>().is_err());
        assert!("3,2".parse::<DegreeSequence>().is_err());
    }

    #[test]
    fn canonical_edges_identify_relabellings() {
        let a = g(3, &[(0, 1), (1, 2), (2, 2)]);
        let b = g(3, &[(2, 1), (1, 0), (0, 0)]);
        assert_eq!(a.canonical_edges(), b.canonical_edges());
        let c = g(3, &[(0, 1), (0, 1), (0, 2)]);
        assert_ne!(a.canonical_edges(), c.canonical_edges());
    }
}
