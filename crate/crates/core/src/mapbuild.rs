//! Word representations of surfaces, polygon gluing, and the search for a
//! map generating a geographic plan.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsu::{DisjointSets, ParitySets};
use crate::error::{Error, Result};
use crate::plan::{Plan, SurfaceClass};

/// A polygon side: the edge it is labeled with, and whether it is barred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub edge: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(edge: usize, inverse: bool) -> Self {
        Self { edge, inverse }
    }
}

/// Polygons given as cyclic words; every letter must occur exactly twice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordRepresentation {
    pub polygons: Vec<Vec<Letter>>,
}

impl WordRepresentation {
    pub fn new(polygons: Vec<Vec<Letter>>) -> Result<Self> {
        let w = Self { polygons };
        w.occurrences()?;
        Ok(w)
    }

    pub fn letter_count(&self) -> usize {
        self.polygons.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// For each letter, its two positions `(polygon, index)`, letters
    /// numbered densely in increasing edge order.
    fn occurrences(&self) -> Result<Vec<[(usize, usize); 2]>> {
        let mut seen: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
        for (p, poly) in self.polygons.iter().enumerate() {
            if poly.is_empty() {
                return Err(Error::usage(format!("polygon {p} has no sides")));
            }
            for (i, l) in poly.iter().enumerate() {
                seen.entry(l.edge).or_default().push((p, i));
            }
        }
        seen.into_iter()
            .map(|(e, pos)| match pos[..] {
                [a, b] => Ok([a, b]),
                _ => Err(Error::usage(format!(
                    "letter {} occurs {} times, expected 2",
                    letter_name(e, true),
                    pos.len()
                ))),
            })
            .collect()
    }

    /// Reverses polygon `p` (the bar on each of its sides flips).
    pub fn reverse_polygon(&mut self, p: usize) {
        let poly = &mut self.polygons[p];
        poly.reverse();
        for l in poly {
            l.inverse = !l.inverse;
        }
    }

    /// Swaps plain and barred for every occurrence of `edge`.
    pub fn flip_letter(&mut self, edge: usize) {
        for l in self.polygons.iter_mut().flatten() {
            if l.edge == edge {
                l.inverse = !l.inverse;
            }
        }
    }

    pub fn rotate_polygon(&mut self, p: usize, by: usize) {
        let len = self.polygons[p].len();
        self.polygons[p].rotate_left(by % len);
    }

    /// One polygon per line, bar written as a `~` prefix.
    pub fn to_text(&self) -> String {
        let alpha = self.polygons.iter().flatten().all(|l| l.edge < 26);
        let mut out = String::new();
        for poly in &self.polygons {
            let words: Vec<String> = poly
                .iter()
                .map(|l| {
                    let name = letter_name(l.edge, alpha);
                    if l.inverse {
                        format!("~{name}")
                    } else {
                        name
                    }
                })
                .collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses one polygon per non-empty line; letters are `a`..`z` or
    /// decimal edge indices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut polygons = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let poly = line
                .split_whitespace()
                .map(|tok| parse_letter(tok).map_err(|m| Error::format(i + 1, m)))
                .collect::<Result<Vec<_>>>()?;
            polygons.push(poly);
        }
        if polygons.is_empty() {
            return Err(Error::format(1, "no polygons"));
        }
        Self::new(polygons)
    }
}

impl fmt::Display for WordRepresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.to_text();
        let parts: Vec<String> = text.lines().map(|l| format!("({l})")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl FromStr for WordRepresentation {
    type Err = Error;

    /// Accepts the line format of [`WordRepresentation::parse`] or the
    /// parenthesized one-line form written by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        if !s.trim_start().starts_with('(') {
            return Self::parse(s);
        }
        let lines: Vec<&str> = s
            .split(')')
            .map(|part| part.trim().trim_start_matches(',').trim())
            .filter(|part| !part.is_empty())
            .map(|part| part.strip_prefix('(').ok_or_else(|| Error::format(1, format!("expected `(` before `{part}`"))))
            .collect::<Result<_>>()?;
        Self::parse(&lines.join("\n"))
    }
}

fn letter_name(edge: usize, alpha: bool) -> String {
    if alpha && edge < 26 {
        char::from(b'a' + edge as u8).to_string()
    } else {
        edge.to_string()
    }
}

fn parse_letter(tok: &str) -> std::result::Result<Letter, String> {
    let (inverse, name) = match tok.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, tok),
    };
    let edge = if let Ok(n) = name.parse::<usize>() {
        n
    } else {
        match name.as_bytes() {
            [c @ b'a'..=b'z'] => (c - b'a') as usize,
            _ => return Err(format!("bad letter `{tok}`")),
        }
    };
    Ok(Letter { edge, inverse })
}

/// The result of gluing all polygons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluedSurface {
    /// Corners `(polygon, index)` grouped into points of the surface. Corner
    /// `i` is the start of side `i`.
    pub vertex_classes: Vec<Vec<(usize, usize)>>,
    pub chi: i64,
    pub orientable: bool,
    pub surface: SurfaceClass,
}

/// Glues matching sides according to their directions.
pub fn glue(w: &WordRepresentation) -> Result<GluedSurface> {
    let occ = w.occurrences()?;
    let polys = &w.polygons;

    let mut linked = DisjointSets::new(polys.len());
    for [(p, _), (q, _)] in &occ {
        linked.union(*p, *q);
    }
    if linked.components() > 1 {
        return Err(Error::usage(
            "word splits into two or more surfaces (a proper subset of polygons pairs all its letters)",
        ));
    }

    let offsets: Vec<usize> = polys
        .iter()
        .scan(0, |acc, p| {
            let o = *acc;
            *acc += p.len();
            Some(o)
        })
        .collect();
    let corner = |p: usize, i: usize| offsets[p] + i % polys[p].len();
    // (tail, head) corners of a side
    let ends = |p: usize, i: usize| {
        let (a, b) = (corner(p, i), corner(p, i + 1));
        if polys[p][i].inverse {
            (b, a)
        } else {
            (a, b)
        }
    };
    let total: usize = polys.iter().map(Vec::len).sum();
    let mut points = DisjointSets::new(total);
    for [(p, i), (q, j)] in &occ {
        let (t1, h1) = ends(*p, *i);
        let (t2, h2) = ends(*q, *j);
        points.union(t1, t2);
        points.union(h1, h2);
    }
    let mut classes: std::collections::BTreeMap<usize, Vec<(usize, usize)>> = Default::default();
    for (p, poly) in polys.iter().enumerate() {
        for i in 0..poly.len() {
            classes.entry(points.find(corner(p, i))).or_default().push((p, i));
        }
    }
    let mut vertex_classes: Vec<_> = classes.into_values().collect();
    vertex_classes.sort();

    let chi = vertex_classes.len() as i64 - occ.len() as i64 + polys.len() as i64;
    let orientable = is_orientable(w);
    let surface = SurfaceClass::from_characteristic(chi, orientable).ok_or_else(|| {
        Error::Inconsistency(format!(
            "glued surface has chi {chi}, orientable {orientable}"
        ))
    })?;
    Ok(GluedSurface {
        vertex_classes,
        chi,
        orientable,
        surface,
    })
}

/// Whether some set of polygon reversals makes every letter occur once
/// plain and once barred.
pub fn is_orientable(w: &WordRepresentation) -> bool {
    let Ok(occ) = w.occurrences() else {
        return false;
    };
    let mut flips = ParitySets::new(w.polygons.len());
    occ.iter().all(|&[(p, i), (q, j)]| {
        let same = w.polygons[p][i].inverse == w.polygons[q][j].inverse;
        if p == q {
            !same
        } else {
            flips.relate(p, q, same)
        }
    })
}

/// Side orientations tried for each Eulerian trail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignPolicy {
    /// Both relative orientations of the two sides of every letter.
    #[default]
    Free,
    /// Sides of a non-loop edge run from its lower to its higher endpoint;
    /// only loop sides branch.
    Rule,
}

impl FromStr for SignPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Self::Free),
            "rule" => Ok(Self::Rule),
            _ => Err(Error::usage(format!("unknown sign policy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MapOptions {
    pub policy: SignPolicy,
    /// Refuse when more raw candidates than this would be generated.
    pub budget: u64,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            policy: SignPolicy::Free,
            budget: 1_000_000,
        }
    }
}

/// A polygon system for a plan: one polygon per face, with the plan vertex
/// at each corner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapCandidate {
    pub word: WordRepresentation,
    /// `labels[f][i]` is the plan vertex at corner `i` of polygon `f`.
    pub labels: Vec<Vec<usize>>,
    /// Number of plan vertices.
    pub vertex_count: usize,
}

impl MapCandidate {
    /// Vertex count of the glued surface equals the plan's, and each point
    /// carries exactly one plan vertex.
    pub fn is_valid(&self) -> bool {
        self.evaluate().map(|(_, ok)| ok).unwrap_or(false)
    }

    pub fn evaluate(&self) -> Result<(GluedSurface, bool)> {
        let s = glue(&self.word)?;
        let ok = s.vertex_classes.len() == self.vertex_count && {
            let mut used = vec![false; self.vertex_count];
            s.vertex_classes.iter().all(|class| {
                let v = self.labels[class[0].0][class[0].1];
                let single = class.iter().all(|&(p, i)| self.labels[p][i] == v);
                single && !std::mem::replace(&mut used[v], true)
            })
        };
        Ok((s, ok))
    }

    /// Occurrences of plan vertex `v` on the boundary of face `f`.
    pub fn boundary_count(&self, v: usize, f: usize) -> usize {
        self.labels[f].iter().filter(|&&x| x == v).count()
    }
}

pub fn validate(cand: &MapCandidate) -> bool {
    cand.is_valid()
}

/// A side of a trail: edge, start vertex, end vertex.
type TrailSide = (usize, usize, usize);

/// Eulerian circuits of `G_f` up to rotation and reversal (plus duplicates
/// arising from parallel copies of one edge).
fn face_trails(p: &Plan, f: usize, budget: u64) -> Result<Vec<Vec<TrailSide>>> {
    let sub = p.face_graph(f)?;
    let g = &sub.graph;
    let inc = g.incidence_lists();
    let k = g.edge_count();
    let mut used = vec![false; k];
    let mut path: Vec<TrailSide> = Vec::with_capacity(k);
    let mut found: Vec<Vec<TrailSide>> = Vec::new();
    let mut seen = HashSet::new();
    let mut steps = 0u64;

    #[allow(clippy::too_many_arguments)]
    fn walk(
        at: usize,
        start: usize,
        sub: &crate::multigraph::Subgraph,
        inc: &[Vec<usize>],
        used: &mut [bool],
        path: &mut Vec<TrailSide>,
        found: &mut Vec<Vec<TrailSide>>,
        seen: &mut HashSet<Vec<TrailSide>>,
        steps: &mut u64,
        budget: u64,
    ) -> Result<()> {
        *steps += 1;
        if *steps > budget {
            return Err(Error::Budget(format!(
                "more than {budget} trail steps in one face graph"
            )));
        }
        if path.len() == used.len() {
            if at == start && seen.insert(path.clone()) {
                found.push(path.clone());
            }
            return Ok(());
        }
        let mut tried = HashSet::new();
        for &e in &inc[at] {
            if used[e] {
                continue;
            }
            let (a, b) = sub.graph.edge(e);
            let next = if a == at { b } else { a };
            // parallel copies of one letter lead to the same trail
            if !tried.insert((sub.edge_ids[e], next)) {
                continue;
            }
            used[e] = true;
            path.push((sub.edge_ids[e], sub.vertex_ids[at], sub.vertex_ids[next]));
            walk(next, start, sub, inc, used, path, found, seen, steps, budget)?;
            path.pop();
            used[e] = false;
        }
        Ok(())
    }

    let (a, b) = g.edge(0);
    used[0] = true;
    path.push((sub.edge_ids[0], sub.vertex_ids[a], sub.vertex_ids[b]));
    walk(b, a, &sub, &inc, &mut used, &mut path, &mut found, &mut seen, &mut steps, budget)?;
    Ok(found)
}

/// Invariant of a candidate under cyclic shifts, polygon reversal, and
/// letter flips: per polygon the cyclic sequence of (corner vertex, letter,
/// whether the letter's two sides agree), minimized over polygon directions.
fn candidate_key(c: &MapCandidate) -> Vec<Vec<(usize, usize, bool)>> {
    let polys = &c.word.polygons;
    let occ = c.word.occurrences().expect("candidate letters pair up");
    let mut letter_at = std::collections::HashMap::new();
    for (idx, pos) in occ.iter().enumerate() {
        letter_at.insert(pos[0], idx);
        letter_at.insert(pos[1], idx);
    }
    let np = polys.len();
    let mut best: Option<Vec<Vec<(usize, usize, bool)>>> = None;
    for dirs in 0u64..(1u64 << np.min(63)) {
        let rev = |p: usize| dirs >> p & 1 == 1;
        let sign = |p: usize, i: usize| polys[p][i].inverse ^ rev(p);
        let key: Vec<Vec<(usize, usize, bool)>> = (0..np)
            .map(|p| {
                let len = polys[p].len();
                let tokens: Vec<(usize, usize, bool)> = (0..len)
                    .map(|i| {
                        let [(p1, i1), (p2, i2)] = occ[letter_at[&(p, i)]];
                        let agree = sign(p1, i1) == sign(p2, i2);
                        // reversed: side i runs from corner i+1 to corner i
                        let start = if rev(p) { c.labels[p][(i + 1) % len] } else { c.labels[p][i] };
                        (start, polys[p][i].edge, agree)
                    })
                    .collect();
                let mut seq = tokens;
                if rev(p) {
                    seq.reverse();
                }
                (0..len)
                    .map(|r| {
                        let mut s = seq.clone();
                        s.rotate_left(r);
                        s
                    })
                    .min()
                    .expect("non-empty polygon")
            })
            .collect();
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.expect("at least one direction vector")
}

/// Every candidate polygon system for a geographic plan, deduplicated up to
/// cyclic shifts, polygon reversal, and letter flips, in generation order.
pub fn word_candidates(p: &Plan, opts: &MapOptions) -> Result<Vec<MapCandidate>> {
    let mut out = Vec::new();
    for_each_candidate(p, opts, |c| {
        out.push(c.clone());
        true
    })?;
    Ok(out)
}

/// Streams deduplicated candidates; `visit` returns `false` to stop.
pub fn for_each_candidate(
    p: &Plan,
    opts: &MapOptions,
    mut visit: impl FnMut(&MapCandidate) -> bool,
) -> Result<()> {
    if !p.is_geographic() {
        return Err(Error::usage("map building needs a geographic plan"));
    }
    let m = p.face_count();
    let trails: Vec<Vec<Vec<TrailSide>>> = (0..m)
        .map(|f| face_trails(p, f, opts.budget))
        .collect::<Result<_>>()?;
    let loops: Vec<bool> = (0..p.edge_count()).map(|e| p.g().is_loop(e)).collect();
    let branching: Vec<usize> = (0..p.edge_count())
        .filter(|&e| opts.policy == SignPolicy::Free || loops[e])
        .collect();
    if branching.len() >= 63 {
        return Err(Error::Budget("too many branching letters".into()));
    }
    let combos: u64 = trails.iter().map(|t| t.len() as u64).product();
    let raw = combos.saturating_mul(1u64 << branching.len());
    if raw > opts.budget {
        return Err(Error::Budget(format!(
            "{raw} raw candidates exceed the budget of {}",
            opts.budget
        )));
    }

    let mut seen = HashSet::new();
    let mut choice = vec![0usize; m];
    loop {
        for bits in 0u64..(1u64 << branching.len()) {
            let mut flip = vec![false; p.edge_count()];
            for (k, &e) in branching.iter().enumerate() {
                flip[e] = bits >> k & 1 == 1;
            }
            let mut first_seen = vec![false; p.edge_count()];
            let mut polygons = Vec::with_capacity(m);
            let mut labels = Vec::with_capacity(m);
            for (f, &c) in choice.iter().enumerate() {
                let trail = &trails[f][c];
                let mut poly = Vec::with_capacity(trail.len());
                for &(e, from, to) in trail {
                    let second = std::mem::replace(&mut first_seen[e], true);
                    let inverse = match opts.policy {
                        SignPolicy::Rule if !loops[e] => from > to,
                        // first side plain, second side plain or barred
                        _ => second && flip[e],
                    };
                    poly.push(Letter::new(e, inverse));
                }
                labels.push(trail.iter().map(|&(_, from, _)| from).collect());
                polygons.push(poly);
            }
            let cand = MapCandidate {
                word: WordRepresentation { polygons },
                labels,
                vertex_count: p.vertex_count(),
            };
            if seen.insert(candidate_key(&cand)) && !visit(&cand) {
                return Ok(());
            }
        }
        // odometer over trail choices
        let mut f = 0;
        loop {
            if f == m {
                return Ok(());
            }
            choice[f] += 1;
            if choice[f] < trails[f].len() {
                break;
            }
            choice[f] = 0;
            f += 1;
        }
    }
}

/// The first valid candidate in generation order, with its surface.
pub fn find_valid_map(p: &Plan, opts: &MapOptions) -> Result<(MapCandidate, GluedSurface)> {
    let mut hit = None;
    let mut failure = None;
    for_each_candidate(p, opts, |c| match c.evaluate() {
        Ok((s, true)) => {
            hit = Some((c.clone(), s));
            false
        }
        Ok(_) => true,
        Err(e) => {
            failure = Some(e);
            false
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    hit.ok_or_else(|| {
        Error::Inconsistency("geographic plan has no valid word representation".into())
    })
}

/// Surfaces over all valid candidates.
pub fn surfaces_of(p: &Plan, opts: &MapOptions) -> Result<BTreeSet<SurfaceClass>> {
    let mut out = BTreeSet::new();
    for c in word_candidates(p, opts)? {
        let (s, ok) = c.evaluate()?;
        if ok {
            out.insert(s.surface);
        }
    }
    if out.is_empty() {
        return Err(Error::Inconsistency(
            "geographic plan has no valid word representation".into(),
        ));
    }
    Ok(out)
}

/// The standard word: `(a ~a)` for the sphere, `a1 b1 ~a1 ~b1 ...` for
/// `S_p`, `c1 c1 c2 c2 ...` for `C_q`.
pub fn normal_form(s: SurfaceClass) -> WordRepresentation {
    let poly = match s {
        SurfaceClass::Orientable { genus: 0 } => vec![Letter::new(0, false), Letter::new(0, true)],
        SurfaceClass::Orientable { genus } => (0..genus as usize)
            .flat_map(|i| {
                let (a, b) = (2 * i, 2 * i + 1);
                [
                    Letter::new(a, false),
                    Letter::new(b, false),
                    Letter::new(a, true),
                    Letter::new(b, true),
                ]
            })
            .collect(),
        SurfaceClass::NonOrientable { crosscaps } => (0..crosscaps as usize)
            .flat_map(|i| [Letter::new(i, false), Letter::new(i, false)])
            .collect(),
    };
    WordRepresentation {
        polygons: vec![poly],
    }
}
