//! Parametric families of realizable and non-realizable bivectors, with
//! explicit partition witnesses for the realizable ones.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::enumerate::{is_realizable, Certificate, RealizeConfig, SearchMode, Verdict, Witness};
use crate::error::{Error, Result};
use crate::multigraph::{DegreeSequence, Multigraph};
use crate::partition::{coloring_plan, EulerianPartition};
use crate::plan::{Plan, SequencePair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FamilyId {
    #[serde(rename = "prop-4.1")]
    Prop41,
    #[serde(rename = "prop-4.2")]
    Prop42,
    #[serde(rename = "prop-4.3")]
    Prop43,
    #[serde(rename = "prop-5.1")]
    Prop51,
    #[serde(rename = "prop-5.2")]
    Prop52,
    #[serde(rename = "prop-5.3")]
    Prop53,
    #[serde(rename = "prop-5.4")]
    Prop54,
    #[serde(rename = "prop-5.5")]
    Prop55,
    #[serde(rename = "prop-5.6")]
    Prop56,
    #[serde(rename = "prop-5.7")]
    Prop57,
    #[serde(rename = "prop-5.8")]
    Prop58,
    #[serde(rename = "prop-5.9")]
    Prop59,
    #[serde(rename = "thm-6.1")]
    Thm61,
    #[serde(rename = "sporadic")]
    Sporadic,
}

impl FamilyId {
    pub const ALL: [FamilyId; 14] = [
        FamilyId::Prop41,
        FamilyId::Prop42,
        FamilyId::Prop43,
        FamilyId::Prop51,
        FamilyId::Prop52,
        FamilyId::Prop53,
        FamilyId::Prop54,
        FamilyId::Prop55,
        FamilyId::Prop56,
        FamilyId::Prop57,
        FamilyId::Prop58,
        FamilyId::Prop59,
        FamilyId::Thm61,
        FamilyId::Sporadic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Prop41 => "prop-4.1",
            FamilyId::Prop42 => "prop-4.2",
            FamilyId::Prop43 => "prop-4.3",
            FamilyId::Prop51 => "prop-5.1",
            FamilyId::Prop52 => "prop-5.2",
            FamilyId::Prop53 => "prop-5.3",
            FamilyId::Prop54 => "prop-5.4",
            FamilyId::Prop55 => "prop-5.5",
            FamilyId::Prop56 => "prop-5.6",
            FamilyId::Prop57 => "prop-5.7",
            FamilyId::Prop58 => "prop-5.8",
            FamilyId::Prop59 => "prop-5.9",
            FamilyId::Thm61 => "thm-6.1",
            FamilyId::Sporadic => "sporadic",
        }
    }

    /// Pair shape and parameter constraints, for `family list`.
    pub fn description(self) -> &'static str {
        match self {
            FamilyId::Prop41 => "(n,n; 5,3,2^(n-4)), n>=4; realizable",
            FamilyId::Prop42 => "(n,n,n,n; 7,5,2^(2n-6)), n>=3; realizable",
            FamilyId::Prop43 => "(n^(2k); ak+1,ak-1,2^(k(n-a))), n>=a>=4, a even, k>=1; realizable",
            FamilyId::Prop51 => "(2^((a+b)/2); a,b), a>b>=1, a+b even; not realizable (tables list the dual)",
            FamilyId::Prop52 => "(3,2^(n-2),1; n,n), n>=2; not realizable",
            FamilyId::Prop53 => "(2a+b-1,1^(b+1); t1..ta), a,b>=2, ti even, sum 2(a+b); not realizable",
            FamilyId::Prop54 => "(3,3,2^a; a+3,b,a+3-b), b<a+3<=2b; not realizable",
            FamilyId::Prop55 => {
                "(2a+4-alpha-beta,alpha,beta; 4,2^a), a>=1, alpha>=beta>=1, alpha+beta!=a+2, alpha+beta/2<=a+2; not realizable"
            }
            FamilyId::Prop56 => {
                "(alpha,beta,gamma,delta; 6,2^a), a>=1, sum 2a+6, (alpha+delta!=a+3 or gamma+delta>=a+3), alpha!=a+3; not realizable"
            }
            FamilyId::Prop57 => {
                "(alpha,beta,gamma,delta; 4,4,2^a), a>=0, sum 2a+8, (alpha>a+2 or delta=1 or alpha+delta!=a+4), alpha!=a+4, (alpha!=a+3 or gamma!=1); not realizable"
            }
            FamilyId::Prop58 => "(a+3,a+3,1,1; 5,3,2^a), a>=0; not realizable",
            FamilyId::Prop59 => "(alpha,beta,gamma; a+4,2,1^a), a>=0, even entries, sum 2a+6; not realizable",
            FamilyId::Thm61 => "(a^(2b); 2b+1,2b+1,2^(ab-2b-1)), a>=3, b>=1; not realizable",
            FamilyId::Sporadic => "(3,3,3,3; 7,4,1) for i=1, (3,3,3,3; 5,4,3) for i=2; not realizable",
        }
    }

    pub fn expected_realizable(self) -> bool {
        matches!(self, FamilyId::Prop41 | FamilyId::Prop42 | FamilyId::Prop43)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown family `{s}`")))
    }
}

pub type Params = BTreeMap<String, i64>;

/// Parses `k=3,a=4,n=4`.
pub fn parse_params(s: &str) -> Result<Params> {
    let mut out = Params::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("expected `name=value`, got `{tok}`")))?;
        let v: i64 = v
            .trim()
            .parse()
            .map_err(|_| Error::usage(format!("parameter `{k}` needs an integer value")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyInstance {
    pub family: FamilyId,
    pub params: Params,
    pub pair: SequencePair,
    pub expected_realizable: bool,
    pub chi: i64,
}

impl FamilyInstance {
    pub fn ell(&self) -> usize {
        self.pair.ell()
    }
}

fn get(p: &Params, name: &str) -> Result<i64> {
    p.get(name)
        .copied()
        .ok_or_else(|| Error::usage(format!("missing parameter `{name}`")))
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::usage(format!("constraint violated: {what}")))
    }
}

fn rep(x: i64, k: i64) -> impl Iterator<Item = i64> {
    std::iter::repeat_n(x, k.max(0) as usize)
}

fn seq(entries: impl IntoIterator<Item = i64>) -> Result<DegreeSequence> {
    let v: Vec<u32> = entries
        .into_iter()
        .map(|x| u32::try_from(x).map_err(|_| Error::usage(format!("entry {x} out of range"))))
        .collect::<Result<_>>()?;
    DegreeSequence::new(v)
}

/// Validates parameters and builds the instance.
pub fn instance(family: FamilyId, params: &Params) -> Result<FamilyInstance> {
    let (d, t): (Vec<i64>, Vec<i64>) = match family {
        FamilyId::Prop41 => {
            let n = get(params, "n")?;
            require(n >= 4, "n >= 4")?;
            (vec![n, n], [5, 3].into_iter().chain(rep(2, n - 4)).collect())
        }
        FamilyId::Prop42 => {
            let n = get(params, "n")?;
            require(n >= 3, "n >= 3")?;
            (vec![n; 4], [7, 5].into_iter().chain(rep(2, 2 * n - 6)).collect())
        }
        FamilyId::Prop43 => {
            let (n, k, a) = (get(params, "n")?, get(params, "k")?, get(params, "a")?);
            require(k >= 1, "k >= 1")?;
            require(n >= a && a >= 4, "n >= a >= 4")?;
            require(a % 2 == 0, "a is even")?;
            (
                rep(n, 2 * k).collect(),
                [a * k + 1, a * k - 1].into_iter().chain(rep(2, k * (n - a))).collect(),
            )
        }
        FamilyId::Prop51 => {
            let (a, b) = (get(params, "a")?, get(params, "b")?);
            require(a > b && b >= 1, "a > b >= 1")?;
            require((a + b) % 2 == 0, "a + b is even")?;
            (rep(2, (a + b) / 2).collect(), vec![a, b])
        }
        FamilyId::Prop52 => {
            let n = get(params, "n")?;
            require(n >= 2, "n >= 2")?;
            (
                [3].into_iter().chain(rep(2, n - 2)).chain([1]).collect(),
                vec![n, n],
            )
        }
        FamilyId::Prop53 => {
            let (a, b) = (get(params, "a")?, get(params, "b")?);
            require(a >= 2 && b >= 2, "a, b >= 2")?;
            let t: Vec<i64> = (1..=a)
                .map(|i| get(params, &format!("t{i}")))
                .collect::<Result<_>>()?;
            require(t.iter().all(|&x| x > 0 && x % 2 == 0), "t entries positive and even")?;
            require(t.iter().sum::<i64>() == 2 * (a + b), "t1 + ... + ta = 2(a+b)")?;
            ([2 * a + b - 1].into_iter().chain(rep(1, b + 1)).collect(), t)
        }
        FamilyId::Prop54 => {
            let (a, b) = (get(params, "a")?, get(params, "b")?);
            require(a >= 0 && b >= 0, "a, b >= 0")?;
            require(b < a + 3 && a + 3 <= 2 * b, "b < a+3 <= 2b")?;
            (
                [3, 3].into_iter().chain(rep(2, a)).collect(),
                vec![a + 3, b, a + 3 - b],
            )
        }
        FamilyId::Prop55 => {
            let (a, al, be) = (get(params, "a")?, get(params, "alpha")?, get(params, "beta")?);
            require(a >= 1, "a >= 1")?;
            require(al >= be && be >= 1, "alpha >= beta >= 1")?;
            require(al + be != a + 2, "alpha + beta != a + 2")?;
            require(2 * al + be <= 2 * (a + 2), "alpha + beta/2 <= a + 2")?;
            let first = 2 * a + 4 - al - be;
            require(first >= 1, "2a + 4 - alpha - beta >= 1")?;
            (vec![first, al, be], [4].into_iter().chain(rep(2, a)).collect())
        }
        FamilyId::Prop56 | FamilyId::Prop57 => {
            let a = get(params, "a")?;
            let [al, be, ga, de] =
                ["alpha", "beta", "gamma", "delta"].map(|k| get(params, k));
            let (al, be, ga, de) = (al?, be?, ga?, de?);
            require(al >= be && be >= ga && ga >= de && de >= 1, "alpha >= beta >= gamma >= delta >= 1")?;
            if family == FamilyId::Prop56 {
                require(a >= 1, "a >= 1")?;
                require(al + be + ga + de == 2 * a + 6, "alpha+beta+gamma+delta = 2a+6")?;
                require(
                    al + de != a + 3 || ga + de >= a + 3,
                    "alpha+delta != a+3 or gamma+delta >= a+3",
                )?;
                require(al != a + 3, "alpha != a+3")?;
                (vec![al, be, ga, de], [6].into_iter().chain(rep(2, a)).collect())
            } else {
                require(a >= 0, "a >= 0")?;
                require(al + be + ga + de == 2 * a + 8, "alpha+beta+gamma+delta = 2a+8")?;
                require(
                    al > a + 2 || de == 1 || al + de != a + 4,
                    "alpha > a+2 or delta = 1 or alpha+delta != a+4",
                )?;
                require(al != a + 4, "alpha != a+4")?;
                require(al != a + 3 || ga != 1, "alpha != a+3 or gamma != 1")?;
                (vec![al, be, ga, de], [4, 4].into_iter().chain(rep(2, a)).collect())
            }
        }
        FamilyId::Prop58 => {
            let a = get(params, "a")?;
            require(a >= 0, "a >= 0")?;
            (vec![a + 3, a + 3, 1, 1], [5, 3].into_iter().chain(rep(2, a)).collect())
        }
        FamilyId::Prop59 => {
            let a = get(params, "a")?;
            let (al, be, ga) = (get(params, "alpha")?, get(params, "beta")?, get(params, "gamma")?);
            require(a >= 0, "a >= 0")?;
            require(al >= be && be >= ga && ga >= 1, "alpha >= beta >= gamma >= 1")?;
            require([al, be, ga].iter().all(|x| x % 2 == 0), "alpha, beta, gamma even")?;
            require(al + be + ga == 2 * a + 6, "alpha+beta+gamma = 2a+6")?;
            (vec![al, be, ga], [a + 4, 2].into_iter().chain(rep(1, a)).collect())
        }
        FamilyId::Thm61 => {
            let (a, b) = (get(params, "a")?, get(params, "b")?);
            require(a >= 3 && b >= 1, "a >= 3 and b >= 1")?;
            (
                rep(a, 2 * b).collect(),
                [2 * b + 1, 2 * b + 1].into_iter().chain(rep(2, a * b - 2 * b - 1)).collect(),
            )
        }
        FamilyId::Sporadic => {
            let i = get(params, "i")?;
            let t = match i {
                1 => vec![7, 4, 1],
                2 => vec![5, 4, 3],
                _ => return Err(Error::usage("constraint violated: i in {1, 2}")),
            };
            (vec![3; 4], t)
        }
    };
    let pair = SequencePair::new(seq(d)?, seq(t)?)?;
    Ok(FamilyInstance {
        family,
        params: params.clone(),
        chi: pair.chi(),
        pair,
        expected_realizable: family.expected_realizable(),
    })
}

/// Assembles a graph on named edges and records, per edge, the two classes
/// its copies go to.
struct Builder {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    colors: Vec<Vec<usize>>,
}

impl Builder {
    fn new(vertices: usize) -> Self {
        Self {
            vertices,
            edges: Vec::new(),
            colors: Vec::new(),
        }
    }

    fn edge(&mut self, u: usize, v: usize) -> Vec<usize> {
        self.edges.push((u, v));
        self.colors.push(Vec::new());
        vec![self.edges.len() - 1]
    }

    /// A `u`–`v` path through `internal` new vertices.
    fn path(&mut self, u: usize, v: usize, internal: usize) -> Vec<usize> {
        let mut prev = u;
        let mut ids = Vec::new();
        for _ in 0..internal {
            let w = self.vertices;
            self.vertices += 1;
            ids.extend(self.edge(prev, w));
            prev = w;
        }
        ids.extend(self.edge(prev, v));
        ids
    }

    /// One copy of each listed edge goes to `class`.
    fn put(&mut self, class: usize, edges: &[usize]) {
        for &e in edges {
            self.colors[e].push(class);
        }
    }

    fn finish(self) -> Result<(Multigraph, EulerianPartition)> {
        let pairs: Vec<(usize, usize)> = self
            .colors
            .iter()
            .enumerate()
            .map(|(e, c)| match c[..] {
                [x, y] => Ok((x, y)),
                _ => Err(Error::Inconsistency(format!(
                    "construction gives edge {e} {} copies",
                    c.len()
                ))),
            })
            .collect::<Result<_>>()?;
        let g = Multigraph::new(self.vertices, self.edges)?;
        let part = EulerianPartition::from_pairs(g.clone(), &pairs)?;
        Ok((g, part))
    }
}

/// The graph `H` realizing `t` and the partition of its double graph into
/// classes of sizes `d`, exactly as in the constructive proofs.
pub fn build_witness(inst: &FamilyInstance) -> Result<(Multigraph, EulerianPartition)> {
    let p = &inst.params;
    let (u, v) = (0, 1);
    let mut b = Builder::new(2);
    match inst.family {
        FamilyId::Prop41 => {
            let n = get(p, "n")? as usize;
            let lp = b.edge(u, u);
            let a = b.path(u, v, n - 4);
            let eb = b.edge(u, v);
            let c = b.edge(u, v);
            b.put(0, &a);
            b.put(0, &eb);
            b.put(0, &eb);
            b.put(0, &c);
            b.put(1, &a);
            b.put(1, &c);
            b.put(1, &lp);
            b.put(1, &lp);
        }
        FamilyId::Prop42 => {
            let n = get(p, "n")? as usize;
            if n == 3 {
                let l1 = b.edge(u, u);
                let l2 = b.edge(u, u);
                let lv = b.edge(v, v);
                let a = b.edge(u, v);
                let eb = b.edge(u, v);
                let c = b.edge(u, v);
                b.put(0, &l1);
                b.put(0, &l1);
                b.put(0, &l2);
                for e in [&l2, &a, &eb] {
                    b.put(1, e);
                }
                for e in [&eb, &c, &lv] {
                    b.put(2, e);
                }
                for e in [&a, &c, &lv] {
                    b.put(3, e);
                }
            } else {
                let lp = b.edge(u, u);
                let a = b.path(u, v, n - 2);
                let eb = b.path(u, v, n - 4);
                let c = b.edge(u, v);
                let d = b.edge(u, v);
                let e = b.edge(u, v);
                for x in [&a, &c] {
                    b.put(0, x);
                }
                for x in [&a, &d] {
                    b.put(1, x);
                }
                for x in [&eb, &c, &d, &e] {
                    b.put(2, x);
                }
                for x in [&eb, &e, &lp, &lp] {
                    b.put(3, x);
                }
            }
        }
        FamilyId::Prop43 => {
            let (n, k, a) = (get(p, "n")? as usize, get(p, "k")? as usize, get(p, "a")? as usize);
            // e[1] is the loop; e[2..=a*k] join u and v, the last k subdivided
            let mut e: Vec<Vec<usize>> = vec![Vec::new()];
            e.push(b.edge(u, u));
            for j in 2..=a * k {
                let ids = if j > (a - 1) * k {
                    b.path(u, v, n - a)
                } else {
                    b.edge(u, v)
                };
                e.push(ids);
            }
            let path = |i: usize| (a - 1) * k + i;
            if k == 1 {
                b.put(0, &e[path(1)]);
                b.put(0, &e[1]);
                b.put(0, &e[1]);
                b.put(1, &e[path(1)]);
                b.put(1, &e[a - 1]);
                b.put(1, &e[a - 1]);
                for j in 2..=a - 2 {
                    b.put(0, &e[j]);
                    b.put(1, &e[j]);
                }
            } else {
                b.put(0, &e[path(1)]);
                b.put(0, &e[1]);
                b.put(0, &e[1]);
                b.put(1, &e[path(2)]);
                b.put(1, &e[2]);
                b.put(1, &e[2]);
                for j in 3..=a - 1 {
                    b.put(0, &e[j]);
                    b.put(1, &e[j]);
                }
                let block = |i: usize| (i - 1) * (a - 1) + 1..=i * (a - 1);
                for i in 2..=k {
                    // classes are numbered from 0, so E_{2i-1} is 2i-2
                    b.put(2 * i - 2, &e[path(i)]);
                    for j in block(i) {
                        b.put(2 * i - 2, &e[j]);
                    }
                }
                for i in 2..k {
                    b.put(2 * i - 1, &e[path(i + 1)]);
                    for j in block(i) {
                        b.put(2 * i - 1, &e[j]);
                    }
                }
                b.put(2 * k - 1, &e[path(1)]);
                for j in block(k) {
                    b.put(2 * k - 1, &e[j]);
                }
            }
        }
        other => {
            return Err(Error::usage(format!(
                "{other} is a non-realizable family; it has no witness"
            )))
        }
    }
    b.finish()
}

/// Copies of each named edge per class for a prop-4.3 witness: rows are the
/// classes `E_1..E_2k`, columns are `P_1..P_k` then `e_1..e_(a-1)k`.
pub fn multiplicity_table(inst: &FamilyInstance) -> Result<Vec<Vec<u8>>> {
    if inst.family != FamilyId::Prop43 {
        return Err(Error::usage("multiplicity tables exist for prop-4.3 only"));
    }
    let p = &inst.params;
    let (n, k, a) = (get(p, "n")? as usize, get(p, "k")? as usize, get(p, "a")? as usize);
    let (_, part) = build_witness(inst)?;
    let blocks = (a - 1) * k;
    let columns: Vec<usize> = (0..k)
        .map(|i| blocks + i * (n - a + 1))
        .chain(0..blocks)
        .collect();
    Ok((0..part.color_count())
        .map(|j| columns.iter().map(|&e| part.multiplicity(e, j)).collect())
        .collect())
}

/// Outcome of checking one instance.
#[derive(Clone, Debug)]
pub enum FamilyVerdict {
    /// A realizable family's construction passed every predicate.
    WitnessVerified { plan: Plan },
    /// A non-realizable family's instance was confirmed by exhaustion.
    Confirmed(Certificate),
    /// The computed answer disagrees with the family's claim.
    Contradiction { detail: String, witness: Option<Box<Witness>> },
}

/// Checks a constructed witness: `H` realizes `t`, the partition is a
/// locally connected Eulerian `d`-partition, and the dual of the derived
/// plan is geographic with bivector `(d;t)`.
pub fn check_witness(inst: &FamilyInstance) -> Result<Plan> {
    let (h, part) = build_witness(inst)?;
    let fail = |what: &str| Error::Inconsistency(format!("{} {:?}: {what}", inst.family, inst.params));
    if h.degree_sequence()? != inst.pair.t {
        return Err(fail(&format!(
            "graph realizes {}, expected {}",
            h.degree_sequence()?,
            inst.pair.t
        )));
    }
    if !part.is_t_partition(&inst.pair.d) {
        return Err(fail("class sizes differ from d"));
    }
    if !part.is_eulerian_partition() {
        return Err(fail("a class is not Eulerian"));
    }
    if !part.is_locally_connected() {
        return Err(fail("a link graph is disconnected"));
    }
    let plan = coloring_plan(&h, &part).dual();
    if !plan.is_geographic() || plan.degree_pair()? != inst.pair {
        return Err(fail("derived plan is not a geographic plan for the pair"));
    }
    Ok(plan)
}

/// Verifies an instance: realizable families by their construction,
/// non-realizable ones by exhaustive strict search, refused above
/// `ell_budget` edges.
pub fn verify(inst: &FamilyInstance, ell_budget: usize) -> Result<FamilyVerdict> {
    if inst.expected_realizable {
        return match check_witness(inst) {
            Ok(plan) => Ok(FamilyVerdict::WitnessVerified { plan }),
            Err(Error::Inconsistency(detail)) => Ok(FamilyVerdict::Contradiction {
                detail,
                witness: None,
            }),
            Err(e) => Err(e),
        };
    }
    verify_nonrealizable(inst, ell_budget)
}

pub fn verify_nonrealizable(inst: &FamilyInstance, ell_budget: usize) -> Result<FamilyVerdict> {
    if inst.ell() > ell_budget {
        return Err(Error::Budget(format!(
            "{} has {} edges, budget is {ell_budget}",
            inst.pair,
            inst.ell()
        )));
    }
    let cfg = RealizeConfig {
        mode: SearchMode::Strict,
        ..Default::default()
    };
    match is_realizable(&inst.pair, &cfg)? {
        Verdict::NotRealizable(c) => Ok(FamilyVerdict::Confirmed(c)),
        Verdict::Realizable(w) => Ok(FamilyVerdict::Contradiction {
            detail: format!("{} {} has a geographic plan", inst.family, inst.pair),
            witness: Some(w),
        }),
    }
}

fn params(kv: &[(&str, i64)]) -> Params {
    kv.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Non-increasing `parts`-tuples of integers `>= min` with step `step`
/// summing to `total`.
fn tuples(total: i64, parts: usize, min: i64, step: i64) -> Vec<Vec<i64>> {
    fn rec(left: i64, parts: usize, max: i64, min: i64, step: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut x = max.min(left);
        while x >= min {
            if (x - min) % step == 0 && x * parts as i64 >= left {
                cur.push(x);
                rec(left - x, parts - 1, x, min, step, cur, out);
                cur.pop();
            }
            x -= 1;
        }
    }
    let mut out = Vec::new();
    rec(total, parts, total, min, step, &mut Vec::new(), &mut out);
    out.reverse();
    out
}

/// All valid instances of a family with at most `max_ell` edges. Prop 5.1
/// is listed in its table orientation `(a,b; 2^n)`.
pub fn table_rows(family: FamilyId, max_ell: usize) -> Vec<FamilyInstance> {
    let max = max_ell as i64;
    let mut cands: Vec<Params> = Vec::new();
    match family {
        FamilyId::Prop41 => cands.extend((4..=max).map(|n| params(&[("n", n)]))),
        FamilyId::Prop42 => cands.extend((3..=max / 2).map(|n| params(&[("n", n)]))),
        FamilyId::Prop43 => {
            for k in 1..=max {
                for a in (4..=max).step_by(2) {
                    for n in a..=max / k {
                        cands.push(params(&[("k", k), ("a", a), ("n", n)]));
                    }
                }
            }
        }
        FamilyId::Prop51 => {
            for l in 2..=max {
                for b in 1..l {
                    cands.push(params(&[("a", 2 * l - b), ("b", b)]));
                }
            }
        }
        FamilyId::Prop52 => cands.extend((2..=max).map(|n| params(&[("n", n)]))),
        FamilyId::Prop53 => {
            for l in 4..=max {
                for a in 2..=l - 2 {
                    for t in tuples(2 * l, a as usize, 2, 2) {
                        let mut p = params(&[("a", a), ("b", l - a)]);
                        for (i, x) in t.iter().enumerate() {
                            p.insert(format!("t{}", i + 1), *x);
                        }
                        cands.push(p);
                    }
                }
            }
        }
        FamilyId::Prop54 => {
            for a in 0..=max - 3 {
                for b in 0..a + 3 {
                    cands.push(params(&[("a", a), ("b", b)]));
                }
            }
        }
        FamilyId::Prop55 => {
            for a in 1..=max - 2 {
                for al in 1..=2 * a + 4 {
                    for be in 1..=al {
                        cands.push(params(&[("a", a), ("alpha", al), ("beta", be)]));
                    }
                }
            }
        }
        FamilyId::Prop56 | FamilyId::Prop57 => {
            let (lo, extra) = if family == FamilyId::Prop56 { (1, 6) } else { (0, 8) };
            for a in lo..=max {
                let total = 2 * a + extra;
                if total / 2 > max {
                    break;
                }
                for t in tuples(total, 4, 1, 1) {
                    cands.push(params(&[
                        ("a", a),
                        ("alpha", t[0]),
                        ("beta", t[1]),
                        ("gamma", t[2]),
                        ("delta", t[3]),
                    ]));
                }
            }
        }
        FamilyId::Prop58 => cands.extend((0..=max - 4).map(|a| params(&[("a", a)]))),
        FamilyId::Prop59 => {
            for a in 0..=max - 3 {
                for t in tuples(2 * a + 6, 3, 2, 2) {
                    cands.push(params(&[("a", a), ("alpha", t[0]), ("beta", t[1]), ("gamma", t[2])]));
                }
            }
        }
        FamilyId::Thm61 => {
            for a in 3..=max {
                for b in 1..=max / a {
                    cands.push(params(&[("a", a), ("b", b)]));
                }
            }
        }
        FamilyId::Sporadic => cands.extend([1, 2].map(|i| params(&[("i", i)]))),
    }
    let mut seen = std::collections::HashSet::new();
    let mut rows: Vec<FamilyInstance> = cands
        .iter()
        .filter_map(|p| instance(family, p).ok())
        .map(|mut inst| {
            if family == FamilyId::Prop51 {
                // the statement has d = 2^n; tables print the dual
                inst.pair = inst.pair.dual();
            }
            inst
        })
        .filter(|inst| inst.ell() <= max_ell && seen.insert(inst.pair.clone()))
        .collect();
    rows.sort_by(|x, y| (x.ell(), &x.pair).cmp(&(y.ell(), &y.pair)));
    rows
}
