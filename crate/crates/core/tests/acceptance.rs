//! Acceptance suite. Runs without the test harness so that every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoplan::enumerate::{
    census, enumerate_duals, is_realizable, realizations_up_to_isomorphism, BivectorCensus,
    RealizeConfig, SearchConfig,
};
use geoplan::families::{self, FamilyId};
use geoplan::mapbuild::{self, MapOptions, WordRepresentation};
use geoplan::partition::{find_partition, partition_to_plan, plan_to_partition, SearchMode};
use geoplan::{Bimatrix, DegreeSequence, Plan, SequencePair, SurfaceClass};

type Outcome = Result<String, String>;

fn plan(s: &str) -> Plan {
    Plan::from_bimatrix(&Bimatrix::parse_inline(s).expect("valid bimatrix"))
}

fn pair(s: &str) -> SequencePair {
    s.parse().expect("valid pair")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn surfaces(p: &Plan) -> BTreeSet<String> {
    mapbuild::surfaces_of(p, &MapOptions::default())
        .expect("geographic plan")
        .iter()
        .map(ToString::to_string)
        .collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// All plans with at most `max_ell` edges from the enumerator: every
/// connected realization (up to isomorphism) of every sequence, with every
/// dual in the given mode.
fn enumerated_plans(max_ell: usize, mode: SearchMode) -> Vec<Plan> {
    let mut out = Vec::new();
    for ell in 1..=max_ell {
        for n in 1..=ell + 1 {
            for d in common::partitions(2 * ell as u32, n) {
                let d = DegreeSequence::new(d).unwrap();
                for g in realizations_up_to_isomorphism(&d) {
                    for m in 1..=ell + 1 {
                        out.extend(enumerate_duals(&g, m, mode));
                    }
                }
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    // (bimatrix, geographic, chi)
    let cases = [
        ("(11|2)", true, 2),
        ("(2|11)", true, 2),
        ("(11,11|11,11)", true, 2),
        ("(11|11)", false, 3),
        ("(110,101|2,2)", true, 2),
        ("(11,20|20,11)", true, 2),
        ("(11,02|11,20)", false, 2),
        ("(20,11,02|110,020,011)", true, 2),
        ("(2|2)", true, 1),
        ("(2,2|2,2)", true, 0),
    ];
    for (b, geo, chi) in cases {
        let p = plan(b);
        ensure(p.is_geographic() == geo, || format!("{b}: geographic should be {geo}"))?;
        ensure(p.euler_characteristic() == chi, || format!("{b}: chi should be {chi}"))?;
    }
    ensure(!plan("(11,02|11,20)").is_even(), || "example 6 should not be even".into())?;
    ensure(plan("(11|11)").report().surfaces.is_empty(), || "chi 3 admits no surface".into())?;
    ensure(plan("(20,11,02|110,020,011)").report().surfaces == ["S_0"], || "example 7 surfaces".into())?;
    ensure(surfaces(&plan("(2|2)")) == set(&["C_1"]), || "example 9 surfaces".into())?;
    ensure(surfaces(&plan("(11|2)")) == set(&["S_0"]), || "example 10 surfaces".into())?;
    ensure(surfaces(&plan("(2,2|2,2)")) == set(&["S_1", "C_2"]), || "example 11 surfaces".into())?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.3}s"))?;
    Ok(format!("13 worked examples exact in {secs:.3}s"))
}

fn censuses(range: std::ops::RangeInclusive<usize>, mode: SearchMode) -> BTreeMap<usize, BivectorCensus> {
    range
        .map(|l| (l, census(&SearchConfig::new(l, mode)).expect("census")))
        .collect()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let cs = censuses(2..=5, SearchMode::Strict);
    let secs = start.elapsed().as_secs_f64();
    let mut checked = 0;
    let named = [
        "3,1;2,2", "4,2;2,2,2", "3,2,1;3,3", "5,1,1,1;4,4", "3,3;3,2,1", "2,2,2;4,2", "3,3,1,1;5,3",
        "4,2,2;5,2,1",
    ];
    let cells = common::TABLE_CELLS.iter().map(|(_, c)| *c).chain(named);
    for cell in cells {
        let p = pair(cell);
        if p.ell() > 5 {
            continue;
        }
        let verdict = cs[&p.ell()].classify(&p);
        ensure(verdict == Some(false), || format!("{p} should be non-realizable, got {verdict:?}"))?;
        checked += 1;
    }
    let mut realizable = 0;
    for f in [FamilyId::Prop41, FamilyId::Prop42, FamilyId::Prop43] {
        for inst in families::table_rows(f, 5) {
            let verdict = cs[&inst.ell()].classify(&inst.pair);
            ensure(verdict == Some(true), || format!("{} {} should be realizable", f, inst.pair))?;
            realizable += 1;
        }
    }
    ensure(cs[&4].classify(&pair("4,4;5,3")) == Some(true), || "(4,4;5,3)".into())?;
    ensure(secs < 60.0, || format!("census 2..5 took {secs:.2}s"))?;
    Ok(format!(
        "{checked} table cells non-realizable, {realizable} constructed pairs realizable; census 2..5 in {secs:.2}s"
    ))
}

fn criterion_3() -> Outcome {
    let strict = RealizeConfig::default();
    for s in ["3,3,3,3;7,4,1", "3,3,3,3;5,4,3"] {
        let v = is_realizable(&pair(s), &strict).map_err(|e| e.to_string())?;
        ensure(!v.is_realizable(), || format!("{s} should be non-realizable"))?;
    }
    let v = is_realizable(&pair("3,3,3,3;7,5"), &strict).map_err(|e| e.to_string())?;
    ensure(v.is_realizable(), || "(3,3,3,3;7,5) should be realizable".into())?;

    let mut runs = Vec::new();
    for workers in [1, 4] {
        let cfg = SearchConfig {
            workers,
            ..SearchConfig::new(6, SearchMode::Strict)
        };
        let start = Instant::now();
        let c = census(&cfg).map_err(|e| e.to_string())?;
        runs.push((c, start.elapsed().as_secs_f64()));
    }
    let (a, ta) = &runs[0];
    let (b, tb) = &runs[1];
    for s in ["3,3,3,3;7,4,1", "3,3,3,3;5,4,3"] {
        ensure(a.classify(&pair(s)) == Some(false), || format!("census disagrees on {s}"))?;
    }
    let mut a_stats = a.stats;
    let mut b_stats = b.stats;
    a_stats.wall_seconds = 0.0;
    b_stats.wall_seconds = 0.0;
    ensure(
        a.realizable == b.realizable && a.non_realizable == b.non_realizable && a_stats == b_stats,
        || "census differs between 1 and 4 workers".into(),
    )?;
    ensure(*ta < 600.0, || format!("ell 6 census took {ta:.1}s"))?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    Ok(format!(
        "sporadic pairs confirmed; ell 6 census {} non-realizable in {ta:.2}s (1 worker) / {tb:.2}s (4 workers on {cores} core(s)), identical output",
        a.non_realizable.len()
    ))
}

fn raw(p: &SequencePair) -> common::RawPair {
    (
        p.d.entries().to_vec(),
        p.t.entries().to_vec(),
    )
}

fn criterion_4() -> Outcome {
    for ell in 1..=3 {
        for (mode, strict) in [(SearchMode::Strict, true), (SearchMode::Necessary, false)] {
            let c = census(&SearchConfig::new(ell, mode)).map_err(|e| e.to_string())?;
            let (real, non) = common::naive_census(ell, strict);
            let got_real: BTreeSet<_> = c.realizable.iter().map(raw).collect();
            let got_non: BTreeSet<_> = c.non_realizable.iter().map(raw).collect();
            ensure(got_real == real && got_non == non, || {
                format!("ell {ell} {mode}: census differs from the reference enumerator")
            })?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut by_ell: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for ell in 1..=4u32 {
        by_ell.push((1..=2 * ell as usize).flat_map(|n| common::partitions(2 * ell, n)).collect());
    }
    let mut agree = 0;
    let mut realizable = 0;
    for _ in 0..200 {
        let ell = rng.gen_range(1..=4);
        let seqs = &by_ell[ell];
        let d = seqs[rng.gen_range(0..seqs.len())].clone();
        let t = seqs[rng.gen_range(0..seqs.len())].clone();
        let p = SequencePair::new(DegreeSequence::new(d.clone()).unwrap(), DegreeSequence::new(t.clone()).unwrap())
            .unwrap();
        let fast = is_realizable(&p, &RealizeConfig::default())
            .map_err(|e| e.to_string())?
            .is_realizable();
        let slow = common::has_geographic_plan(&d, &t);
        ensure(fast == slow, || format!("{p}: search says {fast}, direct enumeration says {slow}"))?;
        agree += 1;
        realizable += fast as usize;
    }
    Ok(format!(
        "census equals reference for ell 1..3 (both modes); {agree}/200 random pairs agree ({realizable} realizable)"
    ))
}

fn criterion_5() -> Outcome {
    let mut plans = enumerated_plans(4, SearchMode::Necessary);
    // arbitrary small bimatrices too, so the evenness implication is exercised
    for ell in 1..=2 {
        for n in 1..=2 {
            for m in 1..=2 {
                let rows_g = common::vectors(n, Some(2));
                let rows_h = common::vectors(m, Some(2));
                for pg in common::multisets(rows_g.len(), ell) {
                    for ph in 0..rows_h.len().pow(ell as u32) {
                        let bg: Vec<Vec<u8>> = pg.iter().map(|&i| rows_g[i].clone()).collect();
                        let bh: Vec<Vec<u8>> = (0..ell)
                            .map(|e| rows_h[ph / rows_h.len().pow(e as u32) % rows_h.len()].clone())
                            .collect();
                        if let Ok(b) = Bimatrix::new(bg, bh) {
                            plans.push(Plan::from_bimatrix(&b));
                        }
                    }
                }
            }
        }
    }
    let mut violations = Vec::new();
    for p in &plans {
        let inc = p.vertex_face_incidence();
        for v in 0..p.vertex_count() {
            let hv = p.vertex_graph(v).unwrap();
            for f in 0..p.face_count() {
                let gf = p.face_graph(f).unwrap();
                let b = inc[v][f] as usize;
                if hv.degree_of(f) != b || gf.degree_of(v) != b {
                    violations.push(format!("{}: incidence at ({v},{f})", p.to_bimatrix()));
                }
            }
        }
        let mut count_v = vec![0; p.edge_count()];
        let mut count_f = vec![0; p.edge_count()];
        for v in 0..p.vertex_count() {
            for &e in &p.vertex_graph(v).unwrap().edge_ids {
                count_v[e] += 1;
            }
        }
        for f in 0..p.face_count() {
            for &e in &p.face_graph(f).unwrap().edge_ids {
                count_f[e] += 1;
            }
        }
        if count_v.iter().chain(&count_f).any(|&c| c != 2) {
            violations.push(format!("{}: edge multiplicity", p.to_bimatrix()));
        }
        if p.is_geographic() && !p.is_even() {
            violations.push(format!("{}: geographic but not even", p.to_bimatrix()));
        }
        let q = p.dual();
        let same = |a: &Plan, b: &Plan| {
            a.is_geographic() == b.is_geographic()
                && a.is_even() == b.is_even()
                && a.is_locally_eulerian() == b.is_locally_eulerian()
                && a.is_connected() == b.is_connected()
                && a.euler_characteristic() == b.euler_characteristic()
        };
        if q.dual() != *p || !same(p, &q) {
            violations.push(format!("{}: duality", p.to_bimatrix()));
        }
        if p.is_geographic() != common::geographic(&p.to_bimatrix().b_g().to_vec(), &p.to_bimatrix().b_h().to_vec()) {
            violations.push(format!("{}: geographic verdict differs from reference", p.to_bimatrix()));
        }
    }
    ensure(violations.is_empty(), || format!("{} violations, first {}", violations.len(), violations[0]))?;
    Ok(format!("{} plans, zero violations", plans.len()))
}

fn criterion_6() -> Outcome {
    let plans = enumerated_plans(3, SearchMode::Strict);
    for p in &plans {
        let pair = p.degree_pair().map_err(|e| e.to_string())?;
        let part = plan_to_partition(p).map_err(|e| format!("{}: {e}", p.to_bimatrix()))?;
        ensure(
            part.is_eulerian_partition() && part.is_t_partition(&pair.t) && part.is_locally_connected(),
            || format!("{}: extracted partition fails a predicate", p.to_bimatrix()),
        )?;
        let back = partition_to_plan(p.g(), &part).map_err(|e| e.to_string())?;
        ensure(
            back.degree_pair().ok() == Some(pair.clone()) && back.is_geographic(),
            || format!("{}: round trip changed the plan", p.to_bimatrix()),
        )?;
        let found = find_partition(p.g(), &pair.t).map_err(|e| e.to_string())?;
        ensure(found.is_some(), || format!("{}: find_partition found nothing", p.to_bimatrix()))?;
    }
    Ok(format!("{} geographic plans round-trip", plans.len()))
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    let mut params = Vec::new();
    for n in 4..=8 {
        params.push((FamilyId::Prop41, format!("n={n}")));
    }
    for n in 3..=6 {
        params.push((FamilyId::Prop42, format!("n={n}")));
    }
    for (k, a, n) in [(1, 4, 4), (2, 4, 5), (3, 4, 4)] {
        params.push((FamilyId::Prop43, format!("k={k},a={a},n={n}")));
    }
    for (f, p) in &params {
        let inst = families::instance(*f, &families::parse_params(p).unwrap()).map_err(|e| e.to_string())?;
        families::check_witness(&inst).map_err(|e| format!("{f} {p}: {e}"))?;
        let expected_chi = match f {
            FamilyId::Prop43 => {
                let (k, a) = (inst.params["k"], inst.params["a"]);
                2 - (a - 2) * k
            }
            _ => 0,
        };
        ensure(inst.chi == expected_chi, || format!("{f} {p}: chi {}", inst.chi))?;
        count += 1;
    }
    let inst = families::instance(FamilyId::Prop43, &families::parse_params("k=3,a=4,n=4").unwrap()).unwrap();
    // columns P1 P2 P3 | e1 .. e9
    let table: Vec<Vec<u8>> = [
        [1, 0, 0, 2, 0, 1, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 2, 1, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1],
        [1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1],
    ]
    .map(|r| r.to_vec())
    .to_vec();
    ensure(families::multiplicity_table(&inst).unwrap() == table, || "multiplicity table differs".into())?;
    Ok(format!("{count} constructions verified; multiplicity table exact"))
}

/// Canonical text of a one-polygon word under rotation, reversal, and
/// letter flips (first occurrence of each letter plain, letters renamed in
/// order of appearance).
fn normalize_word(w: &[(usize, bool)]) -> String {
    let len = w.len();
    let mut best: Option<String> = None;
    for rev in [false, true] {
        let seq: Vec<(usize, bool)> = if rev {
            w.iter().rev().map(|&(l, b)| (l, !b)).collect()
        } else {
            w.to_vec()
        };
        for r in 0..len {
            let mut flip = BTreeMap::new();
            let mut names = BTreeMap::new();
            let text: Vec<String> = (0..len)
                .map(|i| {
                    let (l, b) = seq[(i + r) % len];
                    let f = *flip.entry(l).or_insert(b);
                    let next = names.len();
                    let name = *names.entry(l).or_insert(next);
                    format!("{}{}", if b ^ f { "~" } else { "" }, name)
                })
                .collect();
            let s = text.join(" ");
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.unwrap()
}

fn letters(w: &WordRepresentation) -> Vec<Vec<(usize, bool)>> {
    w.polygons
        .iter()
        .map(|p| p.iter().map(|l| (l.edge, l.inverse)).collect())
        .collect()
}

fn criterion_8() -> Outcome {
    let p = plan("(2,2|2,2)");
    let cands = mapbuild::word_candidates(&p, &MapOptions::default()).map_err(|e| e.to_string())?;
    ensure(cands.len() == 8, || format!("{} candidates", cands.len()))?;
    // the eight words with their surfaces and validity
    let known = [
        ("a b ~a ~b", "S_1", true),
        ("a b ~b ~a", "S_0", false),
        ("a a b ~b", "C_1", false),
        ("a ~a b b", "C_1", false),
        ("a b a b", "C_1", false),
        ("a a b b", "C_2", true),
        ("a b ~a b", "C_2", true),
        ("a b a ~b", "C_2", true),
    ];
    let expected: BTreeMap<String, (String, bool)> = known
        .iter()
        .map(|(w, s, v)| {
            let w = WordRepresentation::parse(w).unwrap();
            (normalize_word(&letters(&w)[0]), (s.to_string(), *v))
        })
        .collect();
    let got: BTreeMap<String, (String, bool)> = cands
        .iter()
        .map(|c| {
            let (s, ok) = c.evaluate().unwrap();
            (normalize_word(&letters(&c.word)[0]), (s.surface.to_string(), ok))
        })
        .collect();
    ensure(expected == got, || format!("candidates {got:?}"))?;

    let fig = WordRepresentation::parse("a b c ~a ~b\nc d e e ~d").unwrap();
    let s = mapbuild::glue(&fig).map_err(|e| e.to_string())?;
    ensure(
        s.chi == -1 && !s.orientable && s.vertex_classes.len() == 2 && s.surface == SurfaceClass::NonOrientable { crosscaps: 3 },
        || format!("figure word glued to {s:?}"),
    )?;

    for genus in 0..=3 {
        let s = SurfaceClass::Orientable { genus };
        ensure(mapbuild::glue(&mapbuild::normal_form(s)).unwrap().surface == s, || format!("normal form {s}"))?;
    }
    for crosscaps in 1..=6 {
        let s = SurfaceClass::NonOrientable { crosscaps };
        ensure(mapbuild::glue(&mapbuild::normal_form(s)).unwrap().surface == s, || format!("normal form {s}"))?;
    }

    let mut words = 0;
    for p in enumerated_plans(4, SearchMode::Strict) {
        for c in mapbuild::word_candidates(&p, &MapOptions::default()).map_err(|e| e.to_string())? {
            let fast = mapbuild::is_orientable(&c.word);
            ensure(fast == common::orientable_brute_force(&letters(&c.word)), || {
                format!("orientability differs on {}", c.word)
            })?;
            words += 1;
        }
    }
    Ok(format!(
        "example 11 gives the 8 expected words; figure word C_3; normal forms S_0..S_3, C_1..C_6; orientability agrees on {words} words"
    ))
}

fn criterion_9() -> Outcome {
    let mut maps = 0;
    let mut plans = 0;
    for p in enumerated_plans(4, SearchMode::Strict) {
        plans += 1;
        let inc = p.vertex_face_incidence();
        let t = p.h().degrees();
        let mut any = false;
        for c in mapbuild::word_candidates(&p, &MapOptions::default()).map_err(|e| e.to_string())? {
            for (f, poly) in c.word.polygons.iter().enumerate() {
                ensure(poly.len() == t[f], || format!("{}: polygon {f} has {} sides", p.to_bimatrix(), poly.len()))?;
            }
            let (s, ok) = c.evaluate().map_err(|e| e.to_string())?;
            if !ok {
                continue;
            }
            any = true;
            maps += 1;
            ensure(s.chi == p.euler_characteristic(), || format!("{}: chi", p.to_bimatrix()))?;
            for v in 0..p.vertex_count() {
                for f in 0..p.face_count() {
                    ensure(2 * c.boundary_count(v, f) == inc[v][f] as usize, || {
                        format!("{}: walk count at ({v},{f}) in {}", p.to_bimatrix(), c.word)
                    })?;
                }
            }
        }
        ensure(any, || format!("{}: no valid map", p.to_bimatrix()))?;
    }
    Ok(format!("{maps} valid maps over {plans} geographic plans, zero violations"))
}

fn criterion_10() -> String {
    let mut parts = Vec::new();
    for mode in [SearchMode::Strict, SearchMode::Necessary] {
        let start = Instant::now();
        match census(&SearchConfig::new(7, mode)) {
            Ok(c) => parts.push(format!(
                "{mode}: {} feasible, {} realizable, {} non-realizable in {:.1}s",
                c.feasible_count,
                c.realizable.len(),
                c.non_realizable.len(),
                start.elapsed().as_secs_f64()
            )),
            Err(e) => parts.push(format!("{mode}: {e}")),
        }
    }
    parts.join("; ")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("worked examples", criterion_1),
        ("census ground truth", criterion_2),
        ("sporadic pairs and ell 6", criterion_3),
        ("oracle equivalence", criterion_4),
        ("plan identities", criterion_5),
        ("partition round trip", criterion_6),
        ("family constructions", criterion_7),
        ("map building", criterion_8),
        ("walk counts", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS ({name}) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL ({name}) {detail}", i + 1);
            }
        }
    }
    println!("criterion 10: REPORTED (ell 7 census, not gated) {}", criterion_10());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
