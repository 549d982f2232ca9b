//! Eulerian partitions of double graphs, link graphs, and the exhaustive
//! search for a locally connected Eulerian t-partition.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::multigraph::{DegreeSequence, DoubleGraph, Multigraph, Subgraph};
use crate::plan::Plan;

/// A coloring of the double graph's edge copies. Copy `2e` and `2e + 1`
/// belong to base edge `e`; colors are `0..color_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerianPartition {
    base: DoubleGraph,
    color: Vec<usize>,
    color_count: usize,
}

impl EulerianPartition {
    pub fn new(base: Multigraph, color: Vec<usize>) -> Result<Self> {
        if color.len() != 2 * base.edge_count() {
            return Err(Error::usage(format!(
                "{} colors given for {} edge copies",
                color.len(),
                2 * base.edge_count()
            )));
        }
        let color_count = color.iter().max().map_or(0, |&c| c + 1);
        Ok(Self {
            base: base.double_graph(),
            color,
            color_count,
        })
    }

    /// Builds a partition from one color pair per base edge.
    pub fn from_pairs(base: Multigraph, pairs: &[(usize, usize)]) -> Result<Self> {
        let color = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        Self::new(base, color)
    }

    pub fn base(&self) -> &Multigraph {
        self.base.base()
    }

    pub fn double_graph(&self) -> &DoubleGraph {
        &self.base
    }

    pub fn color_of(&self, copy: usize) -> usize {
        self.color[copy]
    }

    pub fn colors(&self) -> &[usize] {
        &self.color
    }

    pub fn color_count(&self) -> usize {
        self.color_count
    }

    /// `|E_j|` indexed by color.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.color_count];
        for &c in &self.color {
            sizes[c] += 1;
        }
        sizes
    }

    /// `μ_j(e)`: copies of base edge `e` carrying color `j`.
    pub fn multiplicity(&self, e: usize, j: usize) -> u8 {
        DoubleGraph::copies(e)
            .iter()
            .filter(|&&c| self.color[c] == j)
            .count() as u8
    }

    /// The graph `(V, E_j)` on the vertices touched by color `j`.
    pub fn class_subgraph(&self, j: usize) -> Result<Subgraph> {
        let g = self.base.graph();
        let edges: Vec<(usize, usize, usize)> = (0..self.color.len())
            .filter(|&c| self.color[c] == j)
            .map(|c| {
                let (u, v) = g.edge(c);
                (c, u, v)
            })
            .collect();
        if edges.is_empty() {
            return Err(Error::usage(format!("color {j} is not used")));
        }
        Ok(Subgraph::from_edges(&edges))
    }

    pub fn is_eulerian_partition(&self) -> bool {
        self.class_sizes()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .all(|(j, _)| {
                self.class_subgraph(j)
                    .and_then(|s| s.is_eulerian())
                    .unwrap_or(false)
            })
    }

    /// Class sizes of the used colors equal `t` as multisets.
    pub fn is_t_partition(&self, t: &DegreeSequence) -> bool {
        let mut sizes: Vec<u32> = self
            .class_sizes()
            .into_iter()
            .filter(|&s| s > 0)
            .map(|s| s as u32)
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes == t.entries()
    }

    pub fn link_graph(&self, v: usize) -> Result<LinkGraph> {
        let g = self.base();
        if v >= g.vertex_count() {
            return Err(Error::usage(format!("vertex {v} out of range")));
        }
        let mut colors = Vec::new();
        let mut edges = Vec::new();
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if a != v && b != v {
                continue;
            }
            let [x, y] = DoubleGraph::copies(e).map(|c| self.color[c]);
            colors.push(x);
            colors.push(y);
            if x != y {
                edges.push((x.min(y), x.max(y)));
            }
        }
        colors.sort_unstable();
        colors.dedup();
        Ok(LinkGraph {
            vertex: v,
            colors,
            edges,
        })
    }

    pub fn is_locally_connected(&self) -> bool {
        (0..self.base().vertex_count()).all(|v| {
            self.link_graph(v)
                .map(|l| l.is_connected())
                .unwrap_or(false)
        })
    }

    /// One line per base edge: `edge: color color`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in 0..self.base().edge_count() {
            let [a, b] = DoubleGraph::copies(e).map(|c| self.color[c]);
            let _ = writeln!(out, "{e}: {a} {b}");
        }
        out
    }

    pub fn parse(base: Multigraph, text: &str) -> Result<Self> {
        let mut pairs = vec![None; base.edge_count()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::format(i + 1, m.to_string());
            let (e, rest) = line.split_once(':').ok_or_else(|| bad("expected `edge: c1 c2`"))?;
            let e: usize = e.trim().parse().map_err(|_| bad("bad edge index"))?;
            let cs: Vec<usize> = rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad color")))
                .collect::<Result<_>>()?;
            let [a, b] = cs[..] else {
                return Err(bad("expected two colors"));
            };
            let slot = pairs.get_mut(e).ok_or_else(|| bad("edge index out of range"))?;
            if slot.replace((a, b)).is_some() {
                return Err(bad("edge listed twice"));
            }
        }
        let pairs: Vec<(usize, usize)> = pairs
            .into_iter()
            .enumerate()
            .map(|(e, p)| p.ok_or_else(|| Error::format(0, format!("edge {e} has no colors"))))
            .collect::<Result<_>>()?;
        Self::from_pairs(base, &pairs)
    }
}

/// `H_v^E`: colors present at `v`, joined once per base edge at `v` whose
/// two copies carry different colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkGraph {
    pub vertex: usize,
    pub colors: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl LinkGraph {
    pub fn is_connected(&self) -> bool {
        if self.colors.len() <= 1 {
            return true;
        }
        let idx = |c: usize| self.colors.binary_search(&c).expect("color present");
        let mut sets = DisjointSets::new(self.colors.len());
        for &(a, b) in &self.edges {
            sets.union(idx(a), idx(b));
        }
        sets.components() == 1
    }
}

/// The dual graph read off a partition: one vertex per used color, edge `e`
/// joining the colors of its two copies.
pub fn partition_to_plan(g: &Multigraph, part: &EulerianPartition) -> Result<Plan> {
    if part.base() != g {
        return Err(Error::usage("partition belongs to a different graph"));
    }
    if !(part.is_eulerian_partition() && part.is_locally_connected()) {
        return Err(Error::usage(
            "partition is not a locally connected Eulerian partition",
        ));
    }
    Ok(coloring_plan(g, part))
}

/// Same as [`partition_to_plan`] without the precondition checks; colors are
/// compacted to the used ones in increasing order.
pub(crate) fn coloring_plan(g: &Multigraph, part: &EulerianPartition) -> Plan {
    let sizes = part.class_sizes();
    let mut index = vec![usize::MAX; sizes.len()];
    let mut next = 0;
    for (c, &s) in sizes.iter().enumerate() {
        if s > 0 {
            index[c] = next;
            next += 1;
        }
    }
    let edges = (0..g.edge_count())
        .map(|e| {
            let [a, b] = DoubleGraph::copies(e).map(|c| index[part.color_of(c)]);
            (a, b)
        })
        .collect();
    let h = Multigraph::new(next, edges).expect("compacted colors");
    Plan::new(g.clone(), h).expect("same edge count")
}

/// Colors copy `2e` with one face of `e` and copy `2e + 1` with the other.
pub fn plan_to_partition(p: &Plan) -> Result<EulerianPartition> {
    if !p.is_geographic() {
        return Err(Error::usage("plan is not geographic"));
    }
    let pairs: Vec<(usize, usize)> = p.h().edges().to_vec();
    EulerianPartition::from_pairs(p.g().clone(), &pairs)
}

/// Which conditions the partition search enforces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Eulerian classes and connected link graphs: geographic plans only.
    #[default]
    Strict,
    /// Even class degrees and a connected dual graph: the evenness and
    /// connectivity filter of the original census.
    Necessary,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(SearchMode::Strict),
            "necessary" => Ok(SearchMode::Necessary),
            _ => Err(Error::usage(format!("unknown mode `{s}` (strict|necessary)"))),
        }
    }
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMode::Strict => "strict",
            SearchMode::Necessary => "necessary",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Partial colorings visited.
    pub nodes: u64,
    /// Complete colorings reached.
    pub leaves: u64,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, o: Self) {
        self.nodes += o.nodes;
        self.leaves += o.leaves;
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PartitionOptions<'a> {
    pub mode: SearchMode,
    /// Refuse with [`Error::Budget`] after this many nodes.
    pub node_budget: Option<u64>,
    pub cancel: Option<&'a AtomicBool>,
}

pub const MAX_COLORS: usize = 128;

/// Searches for a locally connected Eulerian t-partition of the double graph
/// of `g` (or, in necessary mode, an even t-partition with connected dual).
/// The search is complete: `None` means none exists.
pub fn find_partition(g: &Multigraph, t: &DegreeSequence) -> Result<Option<EulerianPartition>> {
    find_partition_with(g, t, &PartitionOptions::default()).map(|(p, _)| p)
}

pub fn find_partition_with(
    g: &Multigraph,
    t: &DegreeSequence,
    opts: &PartitionOptions<'_>,
) -> Result<(Option<EulerianPartition>, SearchStats)> {
    if g.edge_count() == 0 || !g.is_connected() {
        return Err(Error::usage("find_partition needs a connected graph with edges"));
    }
    if t.sum() != 2 * g.edge_count() as u64 {
        return Err(Error::usage(format!(
            "sum of t is {}, expected {}",
            t.sum(),
            2 * g.edge_count()
        )));
    }
    if t.len() > MAX_COLORS {
        return Err(Error::usage(format!("at most {MAX_COLORS} classes are supported")));
    }
    let mut s = Searcher::new(g, t, opts);
    let found = s.dfs(0)?;
    let stats = s.stats;
    let part = found
        .then(|| EulerianPartition::from_pairs(g.clone(), &s.pair))
        .transpose()?;
    Ok((part, stats))
}

/// Edge order for the search: vertices in BFS order from a maximum-degree
/// vertex, each contributing its not yet listed edges. Vertices close early.
fn edge_order(g: &Multigraph) -> Vec<usize> {
    let inc = g.incidence_lists();
    let deg = g.degrees();
    let start = (0..g.vertex_count())
        .max_by_key(|&v| (deg[v], std::cmp::Reverse(v)))
        .unwrap_or(0);
    let mut seen_v = vec![false; g.vertex_count()];
    let mut seen_e = vec![false; g.edge_count()];
    let mut queue = std::collections::VecDeque::from([start]);
    seen_v[start] = true;
    let mut order = Vec::with_capacity(g.edge_count());
    while let Some(v) = queue.pop_front() {
        for &e in &inc[v] {
            if !seen_e[e] {
                seen_e[e] = true;
                order.push(e);
            }
            let (a, b) = g.edge(e);
            let w = if a == v { b } else { a };
            if !seen_v[w] {
                seen_v[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

struct Searcher<'a> {
    g: &'a Multigraph,
    mode: SearchMode,
    budget: Option<u64>,
    cancel: Option<&'a AtomicBool>,
    order: Vec<usize>,
    inc: Vec<Vec<usize>>,
    target: Vec<u32>,
    group: Vec<usize>,
    group_start: Vec<usize>,
    group_used: Vec<usize>,
    size: Vec<u32>,
    parity: Vec<u128>,
    open_nonloop: Vec<u32>,
    open_all: Vec<u32>,
    pair: Vec<(usize, usize)>,
    scratch: Vec<usize>,
    stats: SearchStats,
}

impl<'a> Searcher<'a> {
    fn new(g: &'a Multigraph, t: &DegreeSequence, opts: &PartitionOptions<'a>) -> Self {
        let target: Vec<u32> = t.entries().to_vec();
        let mut group = Vec::with_capacity(target.len());
        let mut group_start = Vec::new();
        for (c, &x) in target.iter().enumerate() {
            if c == 0 || target[c - 1] != x {
                group_start.push(c);
            }
            group.push(group_start.len() - 1);
        }
        let n = g.vertex_count();
        let mut open_nonloop = vec![0; n];
        let mut open_all = vec![0; n];
        for &(u, v) in g.edges() {
            open_all[u] += 1;
            if u != v {
                open_all[v] += 1;
                open_nonloop[u] += 1;
                open_nonloop[v] += 1;
            }
        }
        Self {
            g,
            mode: opts.mode,
            budget: opts.node_budget,
            cancel: opts.cancel,
            order: edge_order(g),
            inc: g.incidence_lists(),
            group_used: vec![0; group_start.len()],
            group,
            group_start,
            size: vec![0; target.len()],
            target,
            parity: vec![0; n],
            open_nonloop,
            open_all,
            pair: vec![(usize::MAX, usize::MAX); g.edge_count()],
            scratch: vec![0; n.max(MAX_COLORS)],
            stats: SearchStats::default(),
        }
    }

    /// Colors available at this point: used ones plus the first unused one
    /// of each equal-target group.
    fn allowed(&self, c: usize) -> bool {
        let gr = self.group[c];
        c <= self.group_start[gr] + self.group_used[gr]
    }

    fn take(&mut self, c: usize, k: u32) {
        if self.size[c] == 0 {
            self.group_used[self.group[c]] += 1;
        }
        self.size[c] += k;
    }

    fn give(&mut self, c: usize, k: u32) {
        self.size[c] -= k;
        if self.size[c] == 0 {
            self.group_used[self.group[c]] -= 1;
        }
    }

    fn dfs(&mut self, k: usize) -> Result<bool> {
        if k == self.order.len() {
            self.stats.leaves += 1;
            return Ok(self.leaf_ok());
        }
        let e = self.order[k];
        let (u, v) = self.g.edge(e);
        let m = self.target.len();
        for c1 in 0..m {
            if !self.allowed(c1) || self.size[c1] >= self.target[c1] {
                continue;
            }
            self.take(c1, 1);
            for c2 in c1..m {
                if !self.allowed(c2) || self.size[c2] >= self.target[c2] {
                    continue;
                }
                self.take(c2, 1);
                self.stats.nodes += 1;
                if let Some(b) = self.budget {
                    if self.stats.nodes > b {
                        return Err(Error::Budget(format!(
                            "partition search exceeded {b} nodes"
                        )));
                    }
                }
                if self.stats.nodes.is_multiple_of(4096)
                    && self.cancel.is_some_and(|c| c.load(Ordering::Relaxed))
                {
                    return Err(Error::Cancelled);
                }
                self.pair[e] = (c1, c2);
                let toggle = (1u128 << c1) ^ (1u128 << c2);
                if u != v {
                    self.parity[u] ^= toggle;
                    self.parity[v] ^= toggle;
                    self.open_nonloop[u] -= 1;
                    self.open_nonloop[v] -= 1;
                    self.open_all[v] -= 1;
                }
                self.open_all[u] -= 1;

                if self.consistent(u, v, c1, c2) && self.dfs(k + 1)? {
                    return Ok(true);
                }

                self.open_all[u] += 1;
                if u != v {
                    self.open_all[v] += 1;
                    self.open_nonloop[u] += 1;
                    self.open_nonloop[v] += 1;
                    self.parity[u] ^= toggle;
                    self.parity[v] ^= toggle;
                }
                self.pair[e] = (usize::MAX, usize::MAX);
                self.give(c2, 1);
            }
            self.give(c1, 1);
        }
        Ok(false)
    }

    fn consistent(&mut self, u: usize, v: usize, c1: usize, c2: usize) -> bool {
        for w in [u, v] {
            let odd = self.parity[w].count_ones();
            if odd > 2 * self.open_nonloop[w] {
                return false;
            }
        }
        for c in [c1, c2] {
            if self.size[c] == self.target[c] {
                let bit = 1u128 << c;
                if self.parity.iter().any(|p| p & bit != 0) {
                    return false;
                }
                if self.mode == SearchMode::Strict && !self.class_connected(c) {
                    return false;
                }
            }
        }
        if self.mode == SearchMode::Strict {
            for w in [u, v] {
                if self.open_all[w] == 0 && !self.link_connected(w) {
                    return false;
                }
            }
        }
        true
    }

    fn class_connected(&mut self, c: usize) -> bool {
        let mut sets = DisjointSets::new(self.g.vertex_count());
        let mut merges = 0usize;
        for (e, &(a, b)) in self.g.edges().iter().enumerate() {
            let (x, y) = self.pair[e];
            if (x == c || y == c) && sets.union(a, b) {
                merges += 1;
            }
        }
        merges + 1 == self.class_vertex_count(c)
    }

    fn class_vertex_count(&mut self, c: usize) -> usize {
        let mark = &mut self.scratch;
        mark[..self.g.vertex_count()].fill(0);
        let mut count = 0;
        for (e, &(a, b)) in self.g.edges().iter().enumerate() {
            let (x, y) = self.pair[e];
            if x == c || y == c {
                for w in [a, b] {
                    if mark[w] == 0 {
                        mark[w] = 1;
                        count += 1;
                    }
                }
            }
        }
        count
    }

    fn link_connected(&self, w: usize) -> bool {
        let mut present: u128 = 0;
        for &e in &self.inc[w] {
            let (x, y) = self.pair[e];
            present |= (1u128 << x) | (1u128 << y);
        }
        if present.count_ones() <= 1 {
            return true;
        }
        // grow a component from the lowest color over link edges
        let mut reached: u128 = 1u128 << present.trailing_zeros();
        loop {
            let before = reached;
            for &e in &self.inc[w] {
                let (x, y) = self.pair[e];
                let (bx, by) = (1u128 << x, 1u128 << y);
                if reached & (bx | by) != 0 {
                    reached |= bx | by;
                }
            }
            if reached == before {
                break;
            }
        }
        reached == present
    }

    fn leaf_ok(&self) -> bool {
        match self.mode {
            // every check already ran when vertices closed and classes filled
            SearchMode::Strict => true,
            SearchMode::Necessary => {
                let mut sets = DisjointSets::new(self.target.len());
                for &(x, y) in &self.pair {
                    sets.union(x, y);
                }
                sets.components() == 1
            }
        }
    }
}
