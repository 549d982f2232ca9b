//! Exhaustive engines: connected realizations of degree sequences, dual
//! completions of a graph, per-pair realizability, and the bivector census.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{DegreeSequence, Multigraph};
use crate::partition::{
    coloring_plan, find_partition_with, EulerianPartition, PartitionOptions, SearchStats,
};
use crate::perm::block_permutation_count;
use crate::plan::{Plan, SequencePair};

pub use crate::partition::SearchMode;

/// Every connected multigraph with degree sequence `d`, one per adjacency
/// matrix. Vertex `i` has degree `d[i]`; edges are listed by `(i, j)` with
/// `i <= j`.
pub fn enumerate_realizations(d: &DegreeSequence) -> Vec<Multigraph> {
    let mut out = Vec::new();
    for_each_realization(d, |g| out.push(g.clone()));
    out
}

/// Callback form of [`enumerate_realizations`].
pub fn for_each_realization(d: &DegreeSequence, mut visit: impl FnMut(&Multigraph)) {
    let n = d.len();
    let mut rem: Vec<u32> = d.entries().to_vec();
    let mut edges = Vec::with_capacity((d.sum() / 2) as usize);
    realize_vertex(0, n, &mut rem, &mut edges, &mut visit);
}

fn realize_vertex(
    i: usize,
    n: usize,
    rem: &mut [u32],
    edges: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&Multigraph),
) {
    if i == n {
        let g = Multigraph::new(n, edges.clone()).expect("endpoints in range");
        if g.is_connected() {
            visit(&g);
        }
        return;
    }
    let r = rem[i];
    let later: u32 = rem[i + 1..].iter().sum();
    for loops in 0..=r / 2 {
        let out = r - 2 * loops;
        if out > later {
            continue;
        }
        let mark = edges.len();
        edges.extend(std::iter::repeat_n((i, i), loops as usize));
        rem[i] = 0;
        distribute(i, i + 1, out, n, rem, edges, visit);
        rem[i] = r;
        edges.truncate(mark);
    }
}

/// Spreads `left` edge ends of vertex `i` over vertices `j..n`.
fn distribute(
    i: usize,
    j: usize,
    left: u32,
    n: usize,
    rem: &mut [u32],
    edges: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&Multigraph),
) {
    if left == 0 {
        realize_vertex(i + 1, n, rem, edges, visit);
        return;
    }
    if j == n {
        return;
    }
    let cap: u32 = rem[j..].iter().sum();
    if cap < left {
        return;
    }
    let max = left.min(rem[j]);
    for x in (0..=max).rev() {
        let mark = edges.len();
        edges.extend(std::iter::repeat_n((i, j), x as usize));
        rem[j] -= x;
        distribute(i, j + 1, left - x, n, rem, edges, visit);
        rem[j] += x;
        edges.truncate(mark);
    }
}

/// Realizations with isomorphic duplicates removed, in first-seen order.
pub fn realizations_up_to_isomorphism(d: &DegreeSequence) -> Vec<Multigraph> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for_each_realization(d, |g| {
        if seen.insert(g.canonical_edges()) {
            out.push(g.clone());
        }
    });
    out
}

/// All columns over {0,1,2}^ℓ whose scalar product with every column of the
/// incidence matrix of `g` is even, in lexicographic order.
///
/// Only the entries equal to 1 matter for parity, so each column is reduced
/// to a bitmask of its odd rows and the test is a popcount parity.
pub fn even_column_candidates(g: &Multigraph) -> Vec<Vec<u8>> {
    let ell = g.edge_count();
    assert!(ell < 64, "column masks hold at most 63 rows");
    let mut odd = vec![0u64; g.vertex_count()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if u != v {
            odd[u] |= 1 << e;
            odd[v] |= 1 << e;
        }
    }
    let mut out = Vec::new();
    let mut col = vec![0u8; ell];
    loop {
        let ones = col
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == 1)
            .fold(0u64, |m, (e, _)| m | 1 << e);
        if odd.iter().all(|&o| (o & ones).count_ones() % 2 == 0) {
            out.push(col.clone());
        }
        // base-3 increment, last row fastest
        let mut k = ell;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if col[k] < 2 {
                col[k] += 1;
                break;
            }
            col[k] = 0;
        }
    }
}

/// Plans `(g, h)` with `h` on `m` faces, built from multisets of even
/// candidate columns whose rows all sum to 2. Necessary mode keeps those
/// with `h` connected; strict mode keeps geographic ones.
pub fn enumerate_duals(g: &Multigraph, m: usize, mode: SearchMode) -> Vec<Plan> {
    let cols: Vec<Vec<u8>> = even_column_candidates(g)
        .into_iter()
        .filter(|c| c.iter().any(|&x| x > 0))
        .collect();
    let ell = g.edge_count();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(m);
    let mut sums = vec![0u8; ell];
    pick_columns(&cols, 0, m, &mut chosen, &mut sums, &mut |picked| {
        let b_h: Vec<Vec<u8>> = (0..ell)
            .map(|e| picked.iter().map(|&c| cols[c][e]).collect())
            .collect();
        let b_g: Vec<Vec<u8>> = (0..ell).map(|e| g.incidence_row(e)).collect();
        let b = crate::plan::Bimatrix::new(b_g, b_h).expect("rows sum to 2");
        let plan = Plan::from_bimatrix(&b);
        let keep = match mode {
            SearchMode::Necessary => plan.h().is_connected(),
            SearchMode::Strict => plan.is_geographic(),
        };
        if keep {
            out.push(plan);
        }
    });
    out
}

fn pick_columns(
    cols: &[Vec<u8>],
    from: usize,
    left: usize,
    chosen: &mut Vec<usize>,
    sums: &mut [u8],
    visit: &mut dyn FnMut(&[usize]),
) {
    if left == 0 {
        if sums.iter().all(|&s| s == 2) {
            visit(chosen);
        }
        return;
    }
    for c in from..cols.len() {
        if cols[c].iter().zip(sums.iter()).any(|(&x, &s)| x + s > 2) {
            continue;
        }
        for (s, &x) in sums.iter_mut().zip(&cols[c]) {
            *s += x;
        }
        chosen.push(c);
        pick_columns(cols, c, left - 1, chosen, sums, visit);
        chosen.pop();
        for (s, &x) in sums.iter_mut().zip(&cols[c]) {
            *s -= x;
        }
    }
}

/// Non-increasing sequences of `parts` positive integers summing to `total`,
/// in lexicographic order.
pub fn sequences_with_sum(total: u32, parts: usize) -> Vec<DegreeSequence> {
    fn rec(left: u32, parts: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left < parts as u32 {
            return;
        }
        let hi = max.min(left - (parts as u32 - 1));
        for x in 1..=hi {
            if x * (parts as u32) < left {
                continue;
            }
            cur.push(x);
            rec(left - x, parts - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    if parts > 0 {
        rec(total, parts, total, &mut Vec::new(), &mut raw);
    }
    let mut seqs: Vec<DegreeSequence> = raw
        .into_iter()
        .filter_map(|v| DegreeSequence::new(v).ok())
        .collect();
    seqs.sort();
    seqs
}

/// Which side of a pair gets realized as the graph being partitioned.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Pick the side with the lower estimated search cost.
    #[default]
    Auto,
    /// Realize `d`, partition by `t`.
    D,
    /// Realize `t`, partition by `d`, and dualize the result.
    T,
}

#[derive(Clone, Debug, Default)]
pub struct RealizeConfig {
    pub mode: SearchMode,
    pub side: Side,
    /// Total partition-search nodes allowed for one pair.
    pub node_budget: Option<u64>,
    /// Realizations are tried concurrently when above 1.
    pub workers: usize,
}

/// Proof of realizability: a realization, its partition, and the plan with
/// bivector `(d;t)`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub realized: Side,
    pub realization: Multigraph,
    pub partition: EulerianPartition,
    pub plan: Plan,
}

/// Record of an exhausted search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub realized: Side,
    pub realizations_tried: usize,
    pub stats: SearchStats,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Realizable(Box<Witness>),
    NotRealizable(Certificate),
}

impl Verdict {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Verdict::Realizable(_))
    }
}

/// Connected realizations up to isomorphism, memoized per sequence.
#[derive(Default)]
pub struct RealizationCache {
    map: Mutex<HashMap<DegreeSequence, Arc<Vec<Multigraph>>>>,
}

impl RealizationCache {
    pub fn get(&self, d: &DegreeSequence) -> Arc<Vec<Multigraph>> {
        if let Some(hit) = self.map.lock().expect("cache lock").get(d) {
            return hit.clone();
        }
        let fresh = Arc::new(realizations_up_to_isomorphism(d));
        self.map
            .lock()
            .expect("cache lock")
            .entry(d.clone())
            .or_insert(fresh)
            .clone()
    }
}

/// Natural log of a rough node count for realizing `side` and coloring by
/// `classes`: realizations times unordered color pairs per edge, divided by
/// the interchangeable-color symmetry.
fn log_cost(realizations: usize, ell: usize, classes: &DegreeSequence) -> f64 {
    if realizations == 0 {
        return f64::NEG_INFINITY;
    }
    let k = classes.len() as f64;
    let labels: Vec<usize> = classes.entries().iter().map(|&x| x as usize).collect();
    let sym = (block_permutation_count(&labels) as f64).ln();
    (realizations as f64).ln() + ell as f64 * (k * (k + 1.0) / 2.0).ln() - sym
}

fn choose_side(pair: &SequencePair, side: Side, cache: &RealizationCache) -> Side {
    match side {
        Side::D | Side::T => side,
        Side::Auto => {
            let ell = pair.ell();
            let rd = cache.get(&pair.d).len();
            let rt = cache.get(&pair.t).len();
            let cd = log_cost(rd, ell, &pair.t);
            let ct = log_cost(rt, ell, &pair.d);
            if cd < ct || (cd == ct && pair.d.len() <= pair.t.len()) {
                Side::D
            } else {
                Side::T
            }
        }
    }
}

/// Decides whether a geographic plan (strict) or a connected even plan
/// (necessary) with bivector `pair` exists.
pub fn is_realizable(pair: &SequencePair, cfg: &RealizeConfig) -> Result<Verdict> {
    is_realizable_cached(pair, cfg, &RealizationCache::default())
}

pub fn is_realizable_cached(
    pair: &SequencePair,
    cfg: &RealizeConfig,
    cache: &RealizationCache,
) -> Result<Verdict> {
    let side = choose_side(pair, cfg.side, cache);
    if cfg.mode == SearchMode::Strict && pair.chi() > 2 {
        return Ok(Verdict::NotRealizable(Certificate {
            realized: side,
            realizations_tried: 0,
            stats: SearchStats::default(),
            reason: format!("Euler characteristic {} exceeds 2", pair.chi()),
        }));
    }
    let (graph_seq, classes) = match side {
        Side::T => (&pair.t, &pair.d),
        _ => (&pair.d, &pair.t),
    };
    let graphs = cache.get(graph_seq);
    let opts = PartitionOptions {
        mode: cfg.mode,
        node_budget: cfg.node_budget,
        cancel: None,
    };
    let found = if cfg.workers > 1 && graphs.len() > 1 {
        search_parallel(&graphs, classes, &opts)?
    } else {
        search_sequential(&graphs, classes, &opts)?
    };
    match found {
        (Some((g, part)), _) => {
            let plan = coloring_plan(&g, &part);
            let plan = if side == Side::T { plan.dual() } else { plan };
            Ok(Verdict::Realizable(Box::new(Witness {
                realized: side,
                realization: g,
                partition: part,
                plan,
            })))
        }
        (None, stats) => Ok(Verdict::NotRealizable(Certificate {
            realized: side,
            realizations_tried: graphs.len(),
            stats,
            reason: "search exhausted".into(),
        })),
    }
}

type Found = (Option<(Multigraph, EulerianPartition)>, SearchStats);

fn search_sequential(
    graphs: &[Multigraph],
    classes: &DegreeSequence,
    opts: &PartitionOptions<'_>,
) -> Result<Found> {
    let mut total = SearchStats::default();
    for g in graphs {
        let mut o = *opts;
        if let Some(b) = opts.node_budget {
            o.node_budget = Some(b.saturating_sub(total.nodes));
        }
        let (part, stats) = find_partition_with(g, classes, &o)?;
        total += stats;
        if let Some(p) = part {
            return Ok((Some((g.clone(), p)), total));
        }
    }
    Ok((None, total))
}

fn search_parallel(
    graphs: &[Multigraph],
    classes: &DegreeSequence,
    opts: &PartitionOptions<'_>,
) -> Result<Found> {
    let cancel = AtomicBool::new(false);
    let results: Vec<Result<(Option<EulerianPartition>, SearchStats)>> = graphs
        .par_iter()
        .map(|g| {
            let o = PartitionOptions {
                cancel: Some(&cancel),
                ..*opts
            };
            let r = find_partition_with(g, classes, &o);
            if matches!(r, Ok((Some(_), _))) {
                cancel.store(true, Ordering::Relaxed);
            }
            r
        })
        .collect();
    let mut total = SearchStats::default();
    let mut hit = None;
    let mut first_err = None;
    for (g, r) in graphs.iter().zip(results) {
        match r {
            Ok((part, stats)) => {
                total += stats;
                if hit.is_none() {
                    hit = part.map(|p| (g.clone(), p));
                }
            }
            Err(Error::Cancelled) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    if hit.is_none() {
        if let Some(e) = first_err {
            return Err(e);
        }
    }
    Ok((hit, total))
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub ell: usize,
    pub mode: SearchMode,
    pub workers: usize,
    /// Per-pair node budget; exceeding it fails the whole census.
    pub node_budget: Option<u64>,
}

impl SearchConfig {
    pub fn new(ell: usize, mode: SearchMode) -> Self {
        Self {
            ell,
            mode,
            workers: 1,
            node_budget: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CensusStats {
    /// Complete colorings reached across all pair searches.
    pub plans_enumerated: u64,
    pub search_nodes: u64,
    pub wall_seconds: f64,
}

/// Every feasible pair in the search window with its verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivectorCensus {
    pub ell: usize,
    pub mode: SearchMode,
    pub feasible_count: usize,
    pub realizable: Vec<SequencePair>,
    pub non_realizable: Vec<SequencePair>,
    pub stats: CensusStats,
}

impl BivectorCensus {
    /// Verdict for `pair` or, failing that, its dual; `None` when neither
    /// orientation lies in the window.
    pub fn classify(&self, pair: &SequencePair) -> Option<bool> {
        let lookup = |p: &SequencePair| {
            if self.realizable.binary_search(p).is_ok() {
                Some(true)
            } else if self.non_realizable.binary_search(p).is_ok() {
                Some(false)
            } else {
                None
            }
        };
        lookup(pair).or_else(|| lookup(&pair.dual()))
    }

    /// All pairs with verdicts, sorted.
    pub fn rows(&self) -> Vec<(&SequencePair, bool)> {
        let mut rows: Vec<(&SequencePair, bool)> = self
            .realizable
            .iter()
            .map(|p| (p, true))
            .chain(self.non_realizable.iter().map(|p| (p, false)))
            .collect();
        rows.sort();
        rows
    }
}

/// The feasible window: `n` in `1..=ℓ/2+1`, `m` in `n..=ℓ+n-2`, both
/// sequences summing to `2ℓ`.
pub fn feasible_window(ell: usize) -> Vec<SequencePair> {
    let total = 2 * ell as u32;
    let mut out = Vec::new();
    for n in 1..=ell / 2 + 1 {
        let ds = sequences_with_sum(total, n);
        for m in n..=(ell + n).saturating_sub(2) {
            let ts = sequences_with_sum(total, m);
            for d in &ds {
                for t in &ts {
                    out.push(SequencePair::new(d.clone(), t.clone()).expect("equal sums"));
                }
            }
        }
    }
    out.sort();
    out
}

pub fn census(cfg: &SearchConfig) -> Result<BivectorCensus> {
    census_with_progress(cfg, |_, _| {})
}

/// Runs the census; `progress(done, total)` is called after each pair.
pub fn census_with_progress(
    cfg: &SearchConfig,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<BivectorCensus> {
    if cfg.ell == 0 {
        return Err(Error::usage("edge count must be at least 1"));
    }
    if cfg.workers == 0 {
        return Err(Error::usage("worker count must be positive"));
    }
    let start = Instant::now();
    let pairs = feasible_window(cfg.ell);
    let cache = RealizationCache::default();
    let done = AtomicUsize::new(0);
    let rcfg = RealizeConfig {
        mode: cfg.mode,
        side: Side::Auto,
        node_budget: cfg.node_budget,
        workers: 1,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Inconsistency(format!("thread pool: {e}")))?;
    let verdicts: Vec<Result<(bool, SearchStats)>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|pair| {
                let v = is_realizable_cached(pair, &rcfg, &cache)?;
                let r = match v {
                    Verdict::Realizable(_) => (true, SearchStats { nodes: 0, leaves: 1 }),
                    Verdict::NotRealizable(c) => (false, c.stats),
                };
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                progress(k, pairs.len());
                Ok(r)
            })
            .collect()
    });
    let mut realizable = Vec::new();
    let mut non_realizable = Vec::new();
    let mut stats = CensusStats::default();
    for (pair, v) in pairs.iter().zip(verdicts) {
        let (ok, s) = v?;
        stats.plans_enumerated += s.leaves;
        stats.search_nodes += s.nodes;
        if ok {
            realizable.push(pair.clone());
        } else {
            non_realizable.push(pair.clone());
        }
    }
    stats.wall_seconds = start.elapsed().as_secs_f64();
    Ok(BivectorCensus {
        ell: cfg.ell,
        mode: cfg.mode,
        feasible_count: pairs.len(),
        realizable,
        non_realizable,
        stats,
    })
}
