//! Reference implementations used as oracles. Nothing here calls into the
//! search code; plans are plain `{0,1,2}` matrices with one row per edge.

#![allow(dead_code)]

use std::collections::BTreeSet;

pub type Matrix = Vec<Vec<u8>>;
pub type RawPair = (Vec<u32>, Vec<u32>);

/// All vectors in `{0,1,2}^k` with entries summing to `sum`.
pub fn vectors(k: usize, sum: Option<u32>) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u8>| {
                (0..=2u8).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| sum.is_none_or(|s| v.iter().map(|&x| x as u32).sum::<u32>() == s));
    out
}

/// Multisets of size `k` drawn from `0..pool`, as non-decreasing index lists.
pub fn multisets(pool: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(pool: usize, k: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in from..pool {
            cur.push(i);
            rec(pool, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, k, 0, &mut Vec::new(), &mut out);
    out
}

pub fn transpose(cols: &[Vec<u8>]) -> Matrix {
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

/// Graph given by incidence rows over `k` vertices: every vertex touched and
/// all in one component.
pub fn connected(rows: &[Vec<u8>], k: usize) -> bool {
    let mut comp: Vec<usize> = (0..k).collect();
    fn root(c: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    let mut touched = vec![false; k];
    for row in rows {
        let ends: Vec<usize> = (0..k).filter(|&i| row[i] > 0).collect();
        for &e in &ends {
            touched[e] = true;
        }
        if let [a, b] = ends[..] {
            let (ra, rb) = (root(&mut comp, a), root(&mut comp, b));
            comp[ra] = rb;
        }
    }
    touched.iter().all(|&t| t) && {
        let r0 = root(&mut comp, 0);
        (0..k).all(|i| root(&mut comp, i) == r0)
    }
}

/// The local graph at column `v` of `own`, drawn in the other side: edges
/// `e` with `own[e][v] > 0`, each taken `own[e][v]` times. Eulerian means
/// non-empty, connected, all degrees even.
pub fn local_eulerian(own: &Matrix, other: &Matrix, v: usize) -> bool {
    let k = other.first().map_or(0, Vec::len);
    let mut deg = vec![0u32; k];
    let mut rows = Vec::new();
    for (e, row) in own.iter().enumerate() {
        if row[v] > 0 {
            for f in 0..k {
                deg[f] += row[v] as u32 * other[e][f] as u32;
            }
            rows.push(other[e].clone());
        }
    }
    if rows.is_empty() || deg.iter().any(|d| d % 2 == 1) {
        return false;
    }
    let present: Vec<usize> = (0..k).filter(|&f| deg[f] > 0).collect();
    let sub: Matrix = rows
        .iter()
        .map(|r| present.iter().map(|&f| r[f]).collect())
        .collect();
    connected(&sub, present.len())
}

pub fn geographic(bg: &Matrix, bh: &Matrix) -> bool {
    let n = bg[0].len();
    let m = bh[0].len();
    connected(bg, n)
        && connected(bh, m)
        && (0..n).all(|v| local_eulerian(bg, bh, v))
        && (0..m).all(|f| local_eulerian(bh, bg, f))
}

pub fn column_sums(b: &Matrix, k: usize) -> Vec<u32> {
    (0..k).map(|j| b.iter().map(|r| r[j] as u32).sum()).collect()
}

fn sorted_desc(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Non-increasing sequences of `parts` positive integers summing to `total`.
pub fn partitions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, parts: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in (1..=max.min(left)).rev() {
            cur.push(x);
            rec(left - x, parts - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, total, &mut Vec::new(), &mut out);
    out
}

/// The census loop written out literally with no pruning: every multiset of
/// rows, every multiset of columns, then a direct predicate check on each
/// plan (`strict`: geographic; otherwise `h` connected, as in the listing).
pub fn naive_census(ell: usize, strict: bool) -> (BTreeSet<RawPair>, BTreeSet<RawPair>) {
    let mut found = BTreeSet::new();
    let mut all = BTreeSet::new();
    for n in 1..=ell / 2 + 1 {
        for m in n..=(ell + n).saturating_sub(2) {
            for dd in partitions(2 * ell as u32, n) {
                for tt in partitions(2 * ell as u32, m) {
                    all.insert((dd.clone(), tt));
                }
            }
        }
        let lines = vectors(n, Some(2));
        for pick in multisets(lines.len(), ell) {
            let bg: Matrix = pick.iter().map(|&i| lines[i].clone()).collect();
            if !connected(&bg, n) {
                continue;
            }
            let d = column_sums(&bg, n);
            let columns: Vec<Vec<u8>> = vectors(ell, None)
                .into_iter()
                .filter(|c| {
                    (0..n).all(|v| {
                        let dot: u32 = (0..ell).map(|e| c[e] as u32 * bg[e][v] as u32).sum();
                        dot.is_multiple_of(2)
                    })
                })
                .collect();
            for m in n..=(ell + n).saturating_sub(2) {
                for cpick in multisets(columns.len(), m) {
                    let cols: Vec<Vec<u8>> = cpick.iter().map(|&i| columns[i].clone()).collect();
                    let bh = transpose(&cols);
                    if bh.iter().any(|r| r.iter().map(|&x| x as u32).sum::<u32>() != 2) {
                        continue;
                    }
                    if !connected(&bh, m) {
                        continue;
                    }
                    if strict && !geographic(&bg, &bh) {
                        continue;
                    }
                    found.insert((sorted_desc(d.clone()), sorted_desc(column_sums(&bh, m))));
                }
            }
        }
    }
    let non: BTreeSet<RawPair> = all.difference(&found).cloned().collect();
    let realizable: BTreeSet<RawPair> = all.intersection(&found).cloned().collect();
    (realizable, non)
}

/// Searches every plan with vertex degrees exactly `d` and face degrees `t`
/// (as multisets) for a geographic one.
pub fn has_geographic_plan(d: &[u32], t: &[u32]) -> bool {
    let n = d.len();
    let m = t.len();
    let ell = (d.iter().sum::<u32>() / 2) as usize;
    let lines = vectors(n, Some(2));
    let columns = vectors(ell, None);
    let mut t_sorted = t.to_vec();
    t_sorted.sort_unstable();
    for pick in multisets(lines.len(), ell) {
        let bg: Matrix = pick.iter().map(|&i| lines[i].clone()).collect();
        if column_sums(&bg, n) != d || !connected(&bg, n) {
            continue;
        }
        let mut rows = vec![0u8; ell];
        let mut chosen = Vec::new();
        if pick_columns(&bg, &columns, 0, &mut rows, &mut chosen, &t_sorted, m) {
            return true;
        }
    }
    false
}

fn pick_columns(
    bg: &Matrix,
    columns: &[Vec<u8>],
    from: usize,
    rows: &mut Vec<u8>,
    chosen: &mut Vec<usize>,
    t_sorted: &[u32],
    m: usize,
) -> bool {
    if chosen.len() == m {
        if rows.iter().any(|&r| r != 2) {
            return false;
        }
        let cols: Vec<Vec<u8>> = chosen.iter().map(|&i| columns[i].clone()).collect();
        let mut sums: Vec<u32> = cols.iter().map(|c| c.iter().map(|&x| x as u32).sum()).collect();
        sums.sort_unstable();
        return sums == t_sorted && geographic(bg, &transpose(&cols));
    }
    for i in from..columns.len() {
        let c = &columns[i];
        if c.iter().zip(rows.iter()).any(|(&x, &r)| x + r > 2) {
            continue;
        }
        for (r, &x) in rows.iter_mut().zip(c) {
            *r += x;
        }
        chosen.push(i);
        let hit = pick_columns(bg, columns, i, rows, chosen, t_sorted, m);
        chosen.pop();
        for (r, &x) in rows.iter_mut().zip(c) {
            *r -= x;
        }
        if hit {
            return true;
        }
    }
    false
}

/// Orientability by trying every set of polygon reversals: each letter must
/// then occur once plain and once barred. `polys[p]` lists `(letter, barred)`.
pub fn orientable_brute_force(polys: &[Vec<(usize, bool)>]) -> bool {
    let p = polys.len();
    (0u64..1 << p).any(|mask| {
        let mut plain = std::collections::HashMap::<usize, (u32, u32)>::new();
        for (i, poly) in polys.iter().enumerate() {
            let flip = mask >> i & 1 == 1;
            for &(l, barred) in poly {
                let e = plain.entry(l).or_default();
                if barred ^ flip {
                    e.1 += 1;
                } else {
                    e.0 += 1;
                }
            }
        }
        plain.values().all(|&(a, b)| a == 1 && b == 1)
    })
}

/// Every cell of the printed tables of non-realizable pairs, by family.
pub const TABLE_CELLS: &[(&str, &str)] = &[
    ("prop-5.1", "3,1;2,2"),
    ("prop-5.1", "4,2;2^3"),
    ("prop-5.1", "5,1;2^3"),
    ("prop-5.1", "5,3;2^4"),
    ("prop-5.1", "6,2;2^4"),
    ("prop-5.1", "7,1;2^4"),
    ("prop-5.1", "6,4;2^5"),
    ("prop-5.1", "7,3;2^5"),
    ("prop-5.1", "8,2;2^5"),
    ("prop-5.1", "9,1;2^5"),
    ("prop-5.2", "3,1;2,2"),
    ("prop-5.2", "3,2,1;3,3"),
    ("prop-5.2", "3,2,2,1;4,4"),
    ("prop-5.2", "3,2^3,1;5,5"),
    ("prop-5.2", "3,2^4,1;6,6"),
    ("prop-5.2", "3,2^5,1;7,7"),
    ("prop-5.3", "5,1,1,1;4,4"),
    ("prop-5.3", "5,1,1,1;6,2"),
    ("prop-5.3", "6,1^4;6,4"),
    ("prop-5.3", "6,1^4;8,2"),
    ("prop-5.3", "7,1,1,1;4,4,2"),
    ("prop-5.3", "7,1,1,1;6,2,2"),
    ("prop-5.3", "8,1^4;4,4,4"),
    ("prop-5.3", "8,1^4;6,4,2"),
    ("prop-5.3", "8,1^4;8,2,2"),
    ("prop-5.4", "3,3;3,2,1"),
    ("prop-5.4", "3,3,2;4,2,2"),
    ("prop-5.4", "3,3,2;4,3,1"),
    ("prop-5.4", "3,3,2,2;5,3,2"),
    ("prop-5.4", "3,3,2,2;5,4,1"),
    ("prop-5.4", "3,3,2,2,2;6,3,3"),
    ("prop-5.4", "3,3,2,2,2;6,4,2"),
    ("prop-5.4", "3,3,2,2,2;6,5,1"),
    ("prop-5.5", "2,2,2;4,2"),
    ("prop-5.5", "4,1,1;4,2"),
    ("prop-5.5", "3,3,2;4,2,2"),
    ("prop-5.5", "5,2,1;4,2,2"),
    ("prop-5.5", "6,1,1;4,2,2"),
    ("prop-5.5", "4,3,3;4,2,2,2"),
    ("prop-5.5", "4,4,2;4,2,2,2"),
    ("prop-5.5", "6,2,2;4,2,2,2"),
    ("prop-5.5", "6,3,1;4,2,2,2"),
    ("prop-5.5", "7,2,1;4,2,2,2"),
    ("prop-5.5", "8,1,1;4,2,2,2"),
    ("prop-5.6", "2,2,2,2;6,2"),
    ("prop-5.6", "5,1,1,1;6,2"),
    ("prop-5.6", "3,3,3,1;6,2,2"),
    ("prop-5.6", "4,2,2,2;6,2,2"),
    ("prop-5.6", "6,2,1,1;6,2,2"),
    ("prop-5.6", "7,1,1,1;6,2,2"),
    ("prop-5.7", "3,2,2,1;4,4"),
    ("prop-5.7", "5,1,1,1;4,4"),
    ("prop-5.7", "3,3,3,1;4,4,2"),
    ("prop-5.7", "4,2,2,2;4,4,2"),
    ("prop-5.7", "6,2,1,1;4,4,2"),
    ("prop-5.7", "7,1,1,1;4,4,2"),
    ("prop-5.7", "4,4,3,1;4,4,2,2"),
    ("prop-5.7", "5,3,2,2;4,4,2,2"),
    ("prop-5.7", "7,2,2,1;4,4,2,2"),
    ("prop-5.7", "7,3,1,1;4,4,2,2"),
    ("prop-5.7", "8,2,1,1;4,4,2,2"),
    ("prop-5.7", "9,1,1,1;4,4,2,2"),
    ("prop-5.8", "3,3,1,1;5,3"),
    ("prop-5.8", "4,4,1,1;5,3,2"),
    ("prop-5.8", "5,5,1,1;5,3,2,2"),
    ("prop-5.8", "6,6,1,1;5,3,2^3"),
    ("prop-5.8", "7,7,1,1;5,3,2^4"),
    ("prop-5.8", "8,8,1,1;5,3,2^5"),
    ("prop-5.9", "2,2,2;4,2"),
    ("prop-5.9", "4,2,2;5,2,1"),
    ("prop-5.9", "4,4,2;6,2,1,1"),
    ("prop-5.9", "6,2,2;6,2,1,1"),
    ("prop-5.9", "4,4,4;7,2,1^3"),
    ("prop-5.9", "6,4,2;7,2,1^3"),
    ("prop-5.9", "8,2,2;7,2,1^3"),
    ("prop-5.9", "6,4,4;8,2,1^4"),
    ("prop-5.9", "6,6,2;8,2,1^4"),
    ("prop-5.9", "8,4,2;8,2,1^4"),
];
