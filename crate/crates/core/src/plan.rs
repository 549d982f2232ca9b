//! Plans, their bimatrices, local vertex/face graphs, and the Edmonds test.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{parse_entries, DegreeSequence, Multigraph, Subgraph};
use crate::perm::for_each_block_permutation;

/// Paired edge×vertex and edge×face incidence matrices with entries in
/// {0,1,2}; each row of either side sums to 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bimatrix {
    b_g: Vec<Vec<u8>>,
    b_h: Vec<Vec<u8>>,
}

impl Bimatrix {
    pub fn new(b_g: Vec<Vec<u8>>, b_h: Vec<Vec<u8>>) -> Result<Self> {
        if b_g.len() != b_h.len() {
            return Err(Error::usage("both sides need the same number of rows"));
        }
        if b_g.is_empty() {
            return Err(Error::usage("a bimatrix needs at least one row"));
        }
        for (side, rows) in [("B_G", &b_g), ("B_H", &b_h)] {
            let width = rows[0].len();
            for (i, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return Err(Error::format(
                        i + 1,
                        format!("{side} row {} has {} columns, expected {width}", i + 1, row.len()),
                    ));
                }
                let sum: u32 = row.iter().map(|&x| u32::from(x)).sum();
                if sum != 2 {
                    return Err(Error::format(
                        i + 1,
                        format!("{side} row {} sums to {sum}, expected 2", i + 1),
                    ));
                }
            }
        }
        Ok(Self { b_g, b_h })
    }

    pub fn b_g(&self) -> &[Vec<u8>] {
        &self.b_g
    }

    pub fn b_h(&self) -> &[Vec<u8>] {
        &self.b_h
    }

    pub fn edge_count(&self) -> usize {
        self.b_g.len()
    }

    /// One row per line: digits of the `B_G` row, `|`, digits of the `B_H`
    /// row. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut b_g = Vec::new();
        let mut b_h = Vec::new();
        let mut first_line = 1;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if b_g.is_empty() {
                first_line = i + 1;
            }
            let (g, h) = parse_row(line, i + 1)?;
            b_g.push(g);
            b_h.push(h);
        }
        if b_g.is_empty() {
            return Err(Error::format(first_line, "no bimatrix rows"));
        }
        // report row errors against file lines, not row numbers
        let lines: Vec<usize> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
            .map(|(i, _)| i + 1)
            .collect();
        Self::new(b_g, b_h).map_err(|e| match e {
            Error::Format { line, message } => Error::Format {
                line: lines.get(line - 1).copied().unwrap_or(line),
                message,
            },
            other => other,
        })
    }

    /// Inline notation such as `(11,02|11,20)`: comma-separated rows of each
    /// side around a single `|`.
    pub fn parse_inline(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (g, h) = s
            .split_once('|')
            .ok_or_else(|| Error::format(1, "expected `|` between the two sides"))?;
        let rows = |part: &str| -> Result<Vec<Vec<u8>>> {
            part.split(',')
                .map(|r| parse_digits(r.trim(), 1))
                .collect()
        };
        Self::new(rows(g)?, rows(h)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (g, h) in self.b_g.iter().zip(&self.b_h) {
            out.push_str(&digits(g));
            out.push('|');
            out.push_str(&digits(h));
            out.push('\n');
        }
        out
    }
}

fn digits(row: &[u8]) -> String {
    row.iter().map(|d| char::from(b'0' + d)).collect()
}

fn parse_digits(s: &str, line: usize) -> Result<Vec<u8>> {
    if s.is_empty() {
        return Err(Error::format(line, "empty matrix row"));
    }
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0'..='2' => Ok(c as u8 - b'0'),
            _ => Err(Error::format(line, format!("unexpected character `{c}` (entries are 0, 1, 2)"))),
        })
        .collect()
}

fn parse_row(line: &str, lineno: usize) -> Result<(Vec<u8>, Vec<u8>)> {
    let (g, h) = line
        .split_once('|')
        .ok_or_else(|| Error::format(lineno, "expected `|` between the two sides"))?;
    Ok((parse_digits(g.trim(), lineno)?, parse_digits(h.trim(), lineno)?))
}

impl fmt::Display for Bimatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.b_g.iter().map(|r| digits(r)).collect();
        let h: Vec<String> = self.b_h.iter().map(|r| digits(r)).collect();
        write!(f, "({}|{})", g.join(","), h.join(","))
    }
}

/// A pair of graphs on one shared, index-identified edge set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plan {
    g: Multigraph,
    h: Multigraph,
}

impl Plan {
    pub fn new(g: Multigraph, h: Multigraph) -> Result<Self> {
        if g.edge_count() != h.edge_count() {
            return Err(Error::usage(format!(
                "edge counts differ: {} vs {}",
                g.edge_count(),
                h.edge_count()
            )));
        }
        if g.edge_count() == 0 {
            return Err(Error::usage("a plan needs at least one edge"));
        }
        Ok(Self { g, h })
    }

    pub fn from_bimatrix(b: &Bimatrix) -> Self {
        let edges = |rows: &[Vec<u8>]| -> Vec<(usize, usize)> {
            rows.iter()
                .map(|row| {
                    let mut ends = row
                        .iter()
                        .enumerate()
                        .flat_map(|(c, &x)| std::iter::repeat_n(c, usize::from(x)));
                    let u = ends.next().expect("row sums to 2");
                    let v = ends.next().expect("row sums to 2");
                    (u, v)
                })
                .collect()
        };
        let g = Multigraph::new(b.b_g[0].len(), edges(&b.b_g)).expect("columns index vertices");
        let h = Multigraph::new(b.b_h[0].len(), edges(&b.b_h)).expect("columns index faces");
        Self { g, h }
    }

    pub fn to_bimatrix(&self) -> Bimatrix {
        let rows = |graph: &Multigraph| -> Vec<Vec<u8>> {
            (0..graph.edge_count()).map(|e| graph.incidence_row(e)).collect()
        };
        Bimatrix {
            b_g: rows(&self.g),
            b_h: rows(&self.h),
        }
    }

    pub fn g(&self) -> &Multigraph {
        &self.g
    }

    pub fn h(&self) -> &Multigraph {
        &self.h
    }

    pub fn vertex_count(&self) -> usize {
        self.g.vertex_count()
    }

    pub fn face_count(&self) -> usize {
        self.h.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.g.edge_count()
    }

    /// `H_v`: the edges at `v` in `g`, taken as edges of `h`, with edges that
    /// are loops in `g` doubled.
    pub fn vertex_graph(&self, v: usize) -> Result<Subgraph> {
        local_graph(&self.g, &self.h, v)
    }

    /// `G_f`: the dual construction of [`Plan::vertex_graph`].
    pub fn face_graph(&self, f: usize) -> Result<Subgraph> {
        local_graph(&self.h, &self.g, f)
    }

    /// `B_Gᵀ · B_H` as an `n × m` matrix.
    pub fn vertex_face_incidence(&self) -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; self.face_count()]; self.vertex_count()];
        for e in 0..self.edge_count() {
            let gr = self.g.incidence_row(e);
            let hr = self.h.incidence_row(e);
            for (v, &a) in gr.iter().enumerate().filter(|(_, &a)| a > 0) {
                for (f, &b) in hr.iter().enumerate().filter(|(_, &b)| b > 0) {
                    out[v][f] += u32::from(a) * u32::from(b);
                }
            }
        }
        out
    }

    pub fn is_even(&self) -> bool {
        self.vertex_face_incidence()
            .iter()
            .flatten()
            .all(|x| x % 2 == 0)
    }

    /// Every vertex graph and every face graph is Eulerian. An empty local
    /// graph (isolated vertex or face) fails.
    pub fn is_locally_eulerian(&self) -> bool {
        let ok = |s: Result<Subgraph>| {
            s.ok()
                .filter(|s| s.graph.edge_count() > 0)
                .and_then(|s| s.is_eulerian().ok())
                .unwrap_or(false)
        };
        (0..self.vertex_count()).all(|v| ok(self.vertex_graph(v)))
            && (0..self.face_count()).all(|f| ok(self.face_graph(f)))
    }

    pub fn is_connected(&self) -> bool {
        self.g.is_connected() && self.h.is_connected()
    }

    /// Edmonds' criterion: connected and locally Eulerian.
    pub fn is_geographic(&self) -> bool {
        self.is_connected() && self.is_locally_eulerian()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn dual(&self) -> Plan {
        Plan {
            g: self.h.clone(),
            h: self.g.clone(),
        }
    }

    /// The bivector `(d;t)`; fails if either side has an isolated vertex.
    pub fn degree_pair(&self) -> Result<SequencePair> {
        SequencePair::new(self.g.degree_sequence()?, self.h.degree_sequence()?)
    }

    /// Edge list of `(g endpoints, h endpoints)` that is identical for
    /// isomorphic plans: minimum over degree-preserving relabellings of
    /// vertices and faces, with rows sorted.
    pub fn canonical_form(&self) -> Vec<((usize, usize), (usize, usize))> {
        let (gorder, glabels) = degree_order(&self.g);
        let (horder, hlabels) = degree_order(&self.h);
        let mut best: Option<Vec<((usize, usize), (usize, usize))>> = None;
        let mut gpos = vec![0usize; self.vertex_count()];
        let mut hpos = vec![0usize; self.face_count()];
        let mut buf = Vec::with_capacity(self.edge_count());
        for_each_block_permutation(&glabels, |gp| {
            for (slot, &p) in gp.iter().enumerate() {
                gpos[gorder[p]] = slot;
            }
            for_each_block_permutation(&hlabels, |hp| {
                for (slot, &p) in hp.iter().enumerate() {
                    hpos[horder[p]] = slot;
                }
                buf.clear();
                for e in 0..self.edge_count() {
                    let (a, b) = self.g.edge(e);
                    let (c, d) = self.h.edge(e);
                    let (a, b) = (gpos[a], gpos[b]);
                    let (c, d) = (hpos[c], hpos[d]);
                    buf.push(((a.min(b), a.max(b)), (c.min(d), c.max(d))));
                }
                buf.sort_unstable();
                if best.as_ref().is_none_or(|b| buf < *b) {
                    best = Some(buf.clone());
                }
            });
        });
        best.unwrap_or_default()
    }

    pub fn is_isomorphic(&self, other: &Plan) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.face_count() == other.face_count()
            && self.edge_count() == other.edge_count()
            && self.canonical_form() == other.canonical_form()
    }

    pub fn report(&self) -> PlanReport {
        let chi = self.euler_characteristic();
        let locally_eulerian = self.is_locally_eulerian();
        let connected_g = self.g.is_connected();
        let connected_h = self.h.is_connected();
        PlanReport {
            n: self.vertex_count(),
            m: self.face_count(),
            ell: self.edge_count(),
            chi,
            connected_g,
            connected_h,
            even: self.is_even(),
            locally_eulerian,
            geographic: connected_g && connected_h && locally_eulerian,
            surfaces: candidate_surfaces(chi).iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn degree_order(graph: &Multigraph) -> (Vec<usize>, Vec<usize>) {
    let deg = graph.degrees();
    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    let labels = order.iter().map(|&v| deg[v]).collect();
    (order, labels)
}

fn local_graph(own: &Multigraph, other: &Multigraph, v: usize) -> Result<Subgraph> {
    if v >= own.vertex_count() {
        return Err(Error::usage(format!(
            "index {v} out of range (0..{})",
            own.vertex_count()
        )));
    }
    let mut edges = Vec::new();
    for (e, &(a, b)) in own.edges().iter().enumerate() {
        if a != v && b != v {
            continue;
        }
        let (x, y) = other.edge(e);
        edges.push((e, x, y));
        if a == b {
            edges.push((e, x, y));
        }
    }
    Ok(Subgraph::from_edges(&edges))
}

/// JSON shape of the `check` report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlanReport {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub chi: i64,
    pub connected_g: bool,
    pub connected_h: bool,
    pub even: bool,
    pub locally_eulerian: bool,
    pub geographic: bool,
    pub surfaces: Vec<String>,
}

/// A bivector `(d;t)` with equal sums.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(
    into = "(DegreeSequence, DegreeSequence)",
    try_from = "(DegreeSequence, DegreeSequence)"
)]
pub struct SequencePair {
    pub d: DegreeSequence,
    pub t: DegreeSequence,
}

impl SequencePair {
    pub fn new(d: DegreeSequence, t: DegreeSequence) -> Result<Self> {
        if d.sum() != t.sum() {
            return Err(Error::usage(format!(
                "infeasible pair: sums {} and {} differ",
                d.sum(),
                t.sum()
            )));
        }
        Ok(Self { d, t })
    }

    pub fn ell(&self) -> usize {
        (self.d.sum() / 2) as usize
    }

    pub fn chi(&self) -> i64 {
        self.d.len() as i64 - self.ell() as i64 + self.t.len() as i64
    }

    pub fn dual(&self) -> SequencePair {
        SequencePair {
            d: self.t.clone(),
            t: self.d.clone(),
        }
    }

    /// `d-entries;t-entries`, the CSV key form.
    pub fn key(&self) -> String {
        format!("{};{}", self.d, self.t)
    }
}

impl From<SequencePair> for (DegreeSequence, DegreeSequence) {
    fn from(p: SequencePair) -> Self {
        (p.d, p.t)
    }
}

impl TryFrom<(DegreeSequence, DegreeSequence)> for SequencePair {
    type Error = Error;

    fn try_from((d, t): (DegreeSequence, DegreeSequence)) -> Result<Self> {
        SequencePair::new(d, t)
    }
}

impl fmt::Display for SequencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.d, self.t)
    }
}

impl FromStr for SequencePair {
    type Err = Error;

    /// Accepts `(3,1;2,2)` or `3,1;2,2`, with `^` powers.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (d, t) = s
            .split_once(';')
            .ok_or_else(|| Error::usage(format!("expected `d;t`, got `{s}`")))?;
        SequencePair::new(
            DegreeSequence::new(parse_entries(d)?)?,
            DegreeSequence::new(parse_entries(t)?)?,
        )
    }
}

/// A closed surface: `S_p` (sphere with `p` handles) or `C_q` (sphere with
/// `q` crosscaps).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceClass {
    Orientable { genus: u32 },
    NonOrientable { crosscaps: u32 },
}

impl SurfaceClass {
    pub fn chi(self) -> i64 {
        match self {
            SurfaceClass::Orientable { genus } => 2 - 2 * i64::from(genus),
            SurfaceClass::NonOrientable { crosscaps } => 2 - i64::from(crosscaps),
        }
    }

    pub fn is_orientable(self) -> bool {
        matches!(self, SurfaceClass::Orientable { .. })
    }

    /// The surface with the given characteristic and orientability, if any.
    pub fn from_characteristic(chi: i64, orientable: bool) -> Option<Self> {
        if orientable {
            (chi <= 2 && chi % 2 == 0).then(|| SurfaceClass::Orientable {
                genus: ((2 - chi) / 2) as u32,
            })
        } else {
            (chi <= 1).then(|| SurfaceClass::NonOrientable {
                crosscaps: (2 - chi) as u32,
            })
        }
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceClass::Orientable { genus } => write!(f, "S_{genus}"),
            SurfaceClass::NonOrientable { crosscaps } => write!(f, "C_{crosscaps}"),
        }
    }
}

impl FromStr for SurfaceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::usage(format!("unknown surface `{s}`"));
        let (kind, num) = s.split_once('_').ok_or_else(bad)?;
        let num: u32 = num.parse().map_err(|_| bad())?;
        match kind {
            "S" => Ok(SurfaceClass::Orientable { genus: num }),
            "C" if num >= 1 => Ok(SurfaceClass::NonOrientable { crosscaps: num }),
            _ => Err(bad()),
        }
    }
}

/// Surfaces with Euler characteristic `chi`, orientable first.
pub fn candidate_surfaces(chi: i64) -> Vec<SurfaceClass> {
    [true, false]
        .into_iter()
        .filter_map(|o| SurfaceClass::from_characteristic(chi, o))
        .collect()
}
