//! The verification suites behind the `verify` command and the acceptance
//! run. Each suite is seeded and deterministic.

use crate::base_algebra::{random_belem, AOperator, BElem, Bimodule, OperatorSpace, PairOfBFaces};
use crate::bnc_core::{enumerate_bnc, side_permutation, BncPartition, ShadingMap, Side, SideMap};
use crate::error::{Error, Result};
use crate::incidence::{BncPoset, IntervalFunction};
use crate::lr_diagrams::two_sums_check;
use crate::moment_cumulant::{
    bi_cumulant_expansion_all, bi_moment_collapse, bifree_sweep, bnc_list, cumulant_series, cumulant_vanishes_on_b_entry,
    e_pi, kappa_pi, multiplicative_convolution_scalar, product_cumulant_rhs, product_tuple, property_i,
    property_ii, property_iii, property_iv, trace, FamilyGens, MomentKind, MomentTable, OperatorTuple, SeriesKey,
    SweepConfig, SweepReport,
};
use crate::operator_model::{
    commuting_faces_check, conjugation_check, expansion_check, random_m2, CommutingFaces, FreeProduct,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Display;
use std::sync::Arc;

/// (number, name, summary) of every suite.
pub const SUITES: [(u8, &str, &str); 12] = [
    (1, "lattice", "|BNC(χ)| is the Catalan number, n ≤ 8"),
    (2, "incidence", "μ∗ζ = δ = ζ∗μ and product-formula μ = recursive μ, n ≤ 6"),
    (3, "two-sums", "LR₀ lateral sum equals the Möbius sum, n ≤ 5, ≤ 3 shades"),
    (4, "e-pi", "choice agreement, properties (i)-(iv), nine-node trace"),
    (5, "cumulants", "round trips, bi-multiplicativity, vanishing, bi-moment identities"),
    (6, "ground-truth", "free product families: universal polynomials and mixed cumulants"),
    (7, "lr-expansion", "μ₁(T₁)⋯μ_n(T_n)1_B as a sum over LR diagrams"),
    (8, "product-cumulants", "cumulants of products of consecutive operators"),
    (9, "convolution", "scalar multiplicative convolution of bi-free pairs"),
    (10, "additivity", "κ of z′+z″ is the sum of the cumulant series"),
    (11, "haar", "conjugation by a Haar bi-unitary"),
    (12, "commuting-faces", "freeness of left faces iff bi-freeness"),
];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteParams {
    pub seed: u64,
    pub max_n: Option<usize>,
    pub depth: Option<usize>,
    pub window: Option<usize>,
    pub budget: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub group: String,
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupStats {
    pub group: String,
    pub checked: usize,
    pub failed: usize,
}

/// Counts per group and every failing instance.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub number: u8,
    pub suite: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
    pub groups: Vec<GroupStats>,
    pub failures: Vec<Record>,
}

impl SuiteReport {
    fn new(number: u8, seed: u64) -> Self {
        let suite = SUITES[number as usize - 1].1.to_string();
        SuiteReport { number, suite, seed, params: BTreeMap::new(), groups: vec![], failures: vec![] }
    }

    pub fn checked(&self) -> usize {
        self.groups.iter().map(|g| g.checked).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.groups.iter().all(|g| g.failed == 0) && self.checked() > 0
    }

    fn param(&mut self, k: &str, v: impl Display) {
        self.params.insert(k.into(), v.to_string());
    }

    fn group(&mut self, g: &str) -> &mut GroupStats {
        if let Some(i) = self.groups.iter().position(|x| x.group == g) {
            return &mut self.groups[i];
        }
        self.groups.push(GroupStats { group: g.into(), checked: 0, failed: 0 });
        self.groups.last_mut().unwrap()
    }

    fn check<T: PartialEq + Display>(&mut self, g: &str, instance: impl Display, lhs: &T, rhs: &T) -> bool {
        let ok = lhs == rhs;
        let s = self.group(g);
        s.checked += 1;
        if !ok {
            s.failed += 1;
            self.failures.push(Record {
                group: g.into(),
                instance: instance.to_string(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        ok
    }

    fn truth(&mut self, g: &str, instance: impl Display, ok: bool) {
        self.check(g, instance, &ok, &true);
    }

    fn sweep(&mut self, g: &str, r: &SweepReport) {
        let s = self.group(g);
        s.checked += r.checked();
        // A word can fail both quantities; count it once.
        let words: std::collections::BTreeSet<_> = r.mismatches.iter().map(|m| (&m.chi, &m.eps, &m.word)).collect();
        s.failed += words.len();
        for m in &r.mismatches {
            self.failures.push(Record {
                group: g.into(),
                instance: format!("{} chi={} eps={} word={:?}", m.quantity, m.chi, m.eps, m.word),
                lhs: m.lhs.to_string(),
                rhs: m.rhs.to_string(),
            });
        }
    }
}

/// Looks a suite up by number or name.
pub fn suite_number(name: &str) -> Result<u8> {
    if let Ok(k) = name.parse::<u8>() {
        if (1..=12).contains(&k) {
            return Ok(k);
        }
    }
    SUITES
        .iter()
        .find(|s| s.1 == name)
        .map(|s| s.0)
        .ok_or_else(|| Error::Parse(format!("unknown suite {name:?}")))
}

pub fn run_suite(number: u8, p: &SuiteParams) -> Result<SuiteReport> {
    match number {
        1 => lattice(p),
        2 => incidence(p),
        3 => two_sums(p),
        4 => e_pi_suite(p),
        5 => cumulants(p),
        6 => ground_truth(p),
        7 => lr_expansion(p),
        8 => product_cumulants(p),
        9 => convolution(p),
        10 => additivity(p),
        11 => haar(p),
        12 => commuting_faces(p),
        _ => Err(Error::IndexOutOfRange { index: number as usize, n: 12 }),
    }
}

const CATALAN: [usize; 9] = [1, 1, 2, 5, 14, 42, 132, 429, 1430];

fn lattice(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(1, p.seed);
    let max_n = p.max_n.unwrap_or(8).min(8);
    r.param("max_n", max_n);
    for n in 1..=max_n {
        for chi in SideMap::all(n) {
            r.check("count", &chi, &enumerate_bnc(&chi)?.len(), &CATALAN[n]);
        }
    }
    Ok(r)
}

fn incidence(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(2, p.seed);
    let max_n = p.max_n.unwrap_or(6);
    r.param("max_n", max_n);
    for n in 1..=max_n {
        for chi in SideMap::all(n) {
            let poset = BncPoset::new(&chi)?;
            let (mu, zeta, delta) =
                (IntervalFunction::mobius(&poset), IntervalFunction::zeta(&poset), IntervalFunction::delta(&poset));
            let rec = IntervalFunction::mobius_recursive(&poset);
            let mz = mu.convolve(&zeta)?;
            let zm = zeta.convolve(&mu)?;
            for &(a, b) in poset.pairs() {
                let at = format!("{chi} [{}, {}]", poset.element(a), poset.element(b));
                let d = delta.get_index(a, b);
                r.check("mu*zeta", &at, &mz.get_index(a, b), &d);
                r.check("zeta*mu", &at, &zm.get_index(a, b), &d);
                r.check("product formula", &at, &mu.get_index(a, b), &rec.get_index(a, b));
            }
        }
    }
    Ok(r)
}

fn two_sums(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(3, p.seed);
    let max_n = p.max_n.unwrap_or(5);
    r.param("max_n", max_n);
    r.param("shades", 3);
    for n in 1..=max_n {
        for chi in SideMap::all(n) {
            for eps in ShadingMap::all(n, 3) {
                let below: Vec<BncPartition> = bnc_list(&chi)?
                    .iter()
                    .filter(|pi| pi.partition().refines(&eps.as_partition()))
                    .cloned()
                    .collect();
                for pi in below {
                    let s = two_sums_check(&pi, &eps)?;
                    r.check("two sums", format!("{chi} {eps} {pi}"), &s.lhs, &s.rhs);
                }
            }
        }
    }
    Ok(r)
}

fn random_op<R: Rng>(x: &Bimodule, side: Side, rng: &mut R) -> AOperator {
    match side {
        Side::Left => x.random_left_operator(2, rng),
        Side::Right => x.random_right_operator(2, rng),
    }
}

fn random_tuple<R: Rng>(x: &Arc<Bimodule>, chi: &SideMap, rng: &mut R) -> Result<OperatorTuple<Bimodule>> {
    let ops = chi.sides().iter().map(|&s| random_op(x, s, rng)).collect();
    OperatorTuple::new(x.clone(), chi.clone(), ops)
}

fn random_chi<R: Rng>(n: usize, rng: &mut R) -> SideMap {
    SideMap::new((0..n).map(|_| if rng.random_bool(0.5) { Side::Left } else { Side::Right }).collect())
}

fn kind_name(k: MomentKind) -> &'static str {
    match k {
        MomentKind::Moment => "E",
        MomentKind::Cumulant => "κ",
    }
}

/// χ-interval decompositions: cuts in ≺ order that no block straddles.
fn valid_cuts(pi: &BncPartition) -> Vec<usize> {
    let n = pi.n();
    let s = side_permutation(pi.chi());
    (1..n)
        .filter(|&c| {
            pi.blocks().iter().all(|b| {
                let below = b.iter().filter(|&&x| s.rank(x) < c).count();
                below == 0 || below == b.len()
            })
        })
        .collect()
}

/// χ-intervals V (rank range) that are unions of blocks and avoid the
/// ≺-extremes.
fn inner_intervals(pi: &BncPartition) -> Vec<Vec<usize>> {
    let n = pi.n();
    let s = side_permutation(pi.chi());
    let mut out = vec![];
    for a in 1..n.saturating_sub(1) {
        for b in a..n - 1 {
            let v: Vec<usize> = (a..=b).map(|k| s.apply(k)).collect();
            if pi.partition().restrict(&v).is_ok() {
                out.push(v);
            }
        }
    }
    out
}

/// Randomized instances of properties (i)-(iv) for one kind.
fn bimult_instances(r: &mut SuiteReport, kind: MomentKind, count: usize, max_n: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let x = Arc::new(Bimodule::random(2, 1, rng));
    let k = kind_name(kind);
    let (mut done_iii, mut done_iv) = (0, 0);
    for _ in 0..count {
        let n = rng.random_range(1..=max_n);
        let chi = random_chi(n, rng);
        let t = random_tuple(&x, &chi, rng)?;
        let pi = bnc_list(&chi)?.choose(rng).unwrap().clone();
        let b = random_belem(2, 3, rng);
        let c = property_i(kind, &pi, &t, &b)?;
        r.check(&format!("property (i) {k}"), format!("{chi} {pi}"), &c.lhs, &c.rhs);
        let q = rng.random_range(0..n);
        let c = property_ii(kind, &pi, &t, q, &b)?;
        r.check(&format!("property (ii) {k}"), format!("{chi} {pi} p={}", q + 1), &c.lhs, &c.rhs);
    }
    while done_iii < count || done_iv < count {
        let n = rng.random_range(2..=max_n);
        let chi = random_chi(n, rng);
        let pi = bnc_list(&chi)?.choose(rng).unwrap().clone();
        let t = random_tuple(&x, &chi, rng)?;
        let cuts = valid_cuts(&pi);
        if done_iii < count && !cuts.is_empty() {
            let s = side_permutation(&chi);
            let mut chosen: Vec<usize> = cuts.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
            if chosen.is_empty() {
                chosen.push(*cuts.choose(rng).unwrap());
            }
            let mut bounds = vec![0];
            bounds.extend(chosen);
            bounds.push(n);
            let intervals: Vec<Vec<usize>> =
                bounds.windows(2).map(|w| (w[0]..w[1]).map(|k| s.apply(k)).collect()).collect();
            let c = property_iii(kind, &pi, &t, &intervals)?;
            r.check(&format!("property (iii) {k}"), format!("{chi} {pi} {intervals:?}"), &c.lhs, &c.rhs);
            done_iii += 1;
        }
        let vs = inner_intervals(&pi);
        if done_iv < count && !vs.is_empty() {
            let v = vs.choose(rng).unwrap();
            let c = property_iv(kind, &pi, &t, v)?;
            let at = format!("{chi} {pi} V={v:?}");
            r.check(&format!("property (iv) {k} via θ"), &at, &c.lhs, &c.via_theta);
            r.check(&format!("property (iv) {k} via γ"), &at, &c.lhs, &c.via_gamma);
            done_iv += 1;
        }
    }
    Ok(())
}

pub const NINE_NODE_TRACE: &str = "E(T1T2 L_{E(T3 L_{E(T4T7)} T5 R_{E(T6T8)} T9)})";

/// The nine-node example: its trace, and its value against the nested
/// formula on random operators.
pub fn nine_node_check(rng: &mut ChaCha8Rng) -> Result<(String, BElem, BElem)> {
    let c = SideMap::parse("lrllrrlrr")?;
    let pi = BncPartition::parse("1,2|3,5,9|4,7|6,8", &c)?;
    let x = Arc::new(Bimodule::random(2, 1, rng));
    let t = random_tuple(&x, &c, rng)?;
    let o = t.ops();
    let e = |ops: &[&AOperator]| x.expect_word(ops);
    let l47 = x.make_lb(&e(&[&o[3], &o[6]])?)?;
    let r68 = x.make_rb(&e(&[&o[5], &o[7]])?)?;
    let inner = x.make_lb(&e(&[&o[2], &l47, &o[4], &r68, &o[8]])?)?;
    let nested = e(&[&o[0], &o[1], &inner])?;
    Ok((trace(&pi, false), e_pi(&pi, &t)?, nested))
}

fn e_pi_suite(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(4, p.seed);
    let max_n = p.max_n.unwrap_or(5);
    let count = p.budget.unwrap_or(200);
    r.param("max_n", max_n);
    r.param("instances", count);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let x = Arc::new(Bimodule::random(2, 1, &mut rng));
    for n in 1..=max_n {
        for chi in SideMap::all(n) {
            let t = random_tuple(&x, &chi, &mut rng)?;
            for pi in bnc_list(&chi)?.iter() {
                let ok = match e_pi(pi, &t) {
                    Ok(_) => true,
                    Err(Error::ChoiceDisagreement { .. }) => false,
                    Err(e) => return Err(e),
                };
                r.truth("L/R choice agreement", format!("{chi} {pi}"), ok);
            }
        }
    }
    bimult_instances(&mut r, MomentKind::Moment, count, max_n, &mut rng)?;
    let (tr, value, nested) = nine_node_check(&mut rng)?;
    r.check("nine-node trace", "lrllrrlrr 1,2|3,5,9|4,7|6,8", &tr, &NINE_NODE_TRACE.to_string());
    r.check("nine-node value", "nested formula", &value, &nested);
    Ok(r)
}

fn cumulants(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(5, p.seed);
    let max_n = p.max_n.unwrap_or(5);
    let count = p.budget.unwrap_or(50);
    r.param("max_n", max_n);
    r.param("instances", count);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let x = Arc::new(Bimodule::random(2, 1, &mut rng));
    for n in 1..=max_n {
        for chi in SideMap::all(n) {
            let t = random_tuple(&x, &chi, &mut rng)?;
            let table = MomentTable::new(&t, true)?;
            let parts = table.partitions().to_vec();
            for (i, pi) in parts.iter().enumerate() {
                let sum = parts
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.partition().refines(pi.partition()))
                    .fold(crate::base_algebra::b_zero(2), |acc, (j, _)| &acc + &table.cumulant(&parts[j]).unwrap());
                r.check("E = Σ κ", format!("{chi} {pi}"), &sum, &table.moments()[i]);
                // κ from its defining Möbius sum, computed apart from the table.
                let mut k = crate::base_algebra::b_zero(2);
                for (j, s) in parts.iter().enumerate().filter(|(_, s)| s.partition().refines(pi.partition())) {
                    let m = crate::incidence::mobius_bnc(s, pi)?;
                    k = &k + &table.moments()[j].scale(&m);
                }
                r.check("κ = E ∗ μ", format!("{chi} {pi}"), &k, &kappa_pi(pi, &t)?);
            }
            if n >= 2 {
                let b = random_belem(2, 3, &mut rng);
                for q in 0..n {
                    let c = cumulant_vanishes_on_b_entry(&t, q, &b)?;
                    r.check("vanishing with L_b/R_b entry", format!("{chi} q={}", q + 1), &c.lhs, &c.rhs);
                }
            }
            for q in 0..n.saturating_sub(1) {
                if chi.side(q) != chi.side(q + 1) {
                    continue;
                }
                for pi in bnc_list(&chi)?.iter().filter(|p| p.partition().same_block(q, q + 1)) {
                    let c = bi_moment_collapse(pi, &t, q)?;
                    r.check("bi-moment collapse", format!("{chi} {pi} q={}", q + 1), &c.lhs, &c.rhs);
                }
                for (pi, c) in bi_cumulant_expansion_all(&t, q)? {
                    r.check("bi-cumulant expansion", format!("{chi} {pi} q={}", q + 1), &c.lhs, &c.rhs);
                }
            }
        }
    }
    bimult_instances(&mut r, MomentKind::Cumulant, count, max_n, &mut rng)?;
    Ok(r)
}

/// Two families on separate components, `gens` generators per side.
fn free_families(
    d: usize,
    m: usize,
    gens: usize,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Arc<FreeProduct>, Vec<FamilyGens<FreeProduct>>)> {
    let comps: Vec<Arc<Bimodule>> = (0..2).map(|_| Arc::new(Bimodule::random(d, m, rng))).collect();
    let fp = Arc::new(FreeProduct::new(comps.clone(), depth)?);
    let fams = comps
        .iter()
        .enumerate()
        .map(|(k, x)| fp.lift_pair(k, &PairOfBFaces::random(x.clone(), gens, gens, 2, rng)))
        .collect::<Result<Vec<_>>>()?;
    Ok((fp, fams))
}

fn ground_truth(p: &SuiteParams) -> Result<SuiteReport> {
    let max_n = p.max_n.unwrap_or(5);
    let depth = p.depth.unwrap_or(max_n);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (fp, fams) = free_families(2, 1, 2, depth, &mut rng)?;
    ground_truth_on(&fp, &fams, p)
}

/// The ground-truth suite on caller-supplied families. The depth of `fp`
/// bounds the order.
pub fn ground_truth_on(fp: &Arc<FreeProduct>, fams: &[FamilyGens<FreeProduct>], p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(6, p.seed);
    let max_n = p.max_n.unwrap_or(5).min(fp.depth());
    let budget = p.budget.unwrap_or(5000);
    r.param("max_n", max_n);
    r.param("depth", fp.depth());
    r.param("budget", budget);
    let cfg = SweepConfig { max_order: max_n, budget, ..Default::default() };
    let rep = bifree_sweep(fp, fams, &cfg)?;
    for o in &rep.orders {
        r.param(&format!("order {} words", o.order), format!("{}/{}", o.checked, o.total));
    }
    r.sweep("mixed cumulants and universal polynomials", &rep);
    Ok(r)
}

fn lr_expansion(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(7, p.seed);
    let max_n = p.max_n.unwrap_or(4);
    let depth = p.depth.unwrap_or(max_n);
    let count = p.budget.unwrap_or(60);
    r.param("max_n", max_n);
    r.param("depth", depth);
    r.param("tuples", count);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let comps: Vec<Arc<Bimodule>> = (0..2).map(|_| Arc::new(Bimodule::random(2, 1, &mut rng))).collect();
    let fp = FreeProduct::new(comps.clone(), depth)?;
    for i in 0..count {
        // Cycle n so every length is covered, weighted toward the largest.
        let n = if i % 2 == 0 { max_n } else { 1 + (i / 2) % max_n };
        let chi = random_chi(n, &mut rng);
        let eps = ShadingMap::new((0..n).map(|_| rng.random_range(0..2)).collect());
        let ops: Vec<AOperator> = (0..n).map(|k| random_op(&comps[eps.label(k)], chi.side(k), &mut rng)).collect();
        let rep = expansion_check(&fp, &chi, &eps, &ops)?;
        r.truth("expansion", format!("{chi} {eps} ({} diagrams)", rep.diagrams), rep.equal);
    }
    Ok(r)
}

fn compositions(n: usize, max_parts: usize) -> Vec<Vec<usize>> {
    (0..1u32 << (n - 1))
        .filter(|mask| mask.count_ones() as usize + 1 <= max_parts)
        .map(|mask| {
            let mut g = vec![0];
            g.extend((1..n).filter(|k| mask >> (k - 1) & 1 == 1));
            g.push(n);
            g
        })
        .collect()
}

fn product_cumulants(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(8, p.seed);
    let max_n = p.max_n.unwrap_or(5);
    r.param("max_n", max_n);
    r.param("max_groups", 3);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let x = Arc::new(Bimodule::random(2, 1, &mut rng));
    for n in 1..=max_n {
        for chi in SideMap::all(n) {
            let t = random_tuple(&x, &chi, &mut rng)?;
            for g in compositions(n, 3) {
                let Ok(pt) = product_tuple(&t, &g) else { continue };
                for pi in bnc_list(pt.chi())?.iter() {
                    let lhs = kappa_pi(pi, &pt)?;
                    let rhs = product_cumulant_rhs(pi, &g, &t)?;
                    r.check("product cumulant", format!("{chi} groups={g:?} {pi}"), &lhs, &rhs);
                }
            }
        }
    }
    Ok(r)
}

fn convolution(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(9, p.seed);
    let max_n = p.max_n.unwrap_or(4);
    let depth = p.depth.unwrap_or(2 * max_n);
    r.param("max_n", max_n);
    r.param("depth", depth);
    r.param("d", 1);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (fp, fams) = free_families(1, 2, 2, depth, &mut rng)?;
    for n in 1..=max_n {
        for alpha in SeriesKey::all(n, 2, 2) {
            let c = multiplicative_convolution_scalar(&fp, &alpha, &fams[0], &fams[1])?;
            r.check("κ of products", &alpha, &c.lhs, &c.rhs);
        }
    }
    Ok(r)
}

fn additivity(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(10, p.seed);
    let max_n = p.max_n.unwrap_or(4);
    let depth = p.depth.unwrap_or(max_n);
    r.param("max_n", max_n);
    r.param("depth", depth);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (fp, fams) = free_families(2, 1, 2, depth, &mut rng)?;
    let sum = fams[0].sum(&fp, &fams[1]);
    for n in 1..=max_n {
        for alpha in SeriesKey::all(n, 2, 2) {
            let bs: Vec<BElem> = (0..n - 1).map(|_| random_belem(2, 2, &mut rng)).collect();
            let lhs = cumulant_series(&fp, &sum, &alpha, &bs)?;
            let rhs = &cumulant_series(&fp, &fams[0], &alpha, &bs)? + &cumulant_series(&fp, &fams[1], &alpha, &bs)?;
            r.check("additivity", &alpha, &lhs, &rhs);
        }
    }
    Ok(r)
}

fn haar(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(11, p.seed);
    let order = p.max_n.unwrap_or(3);
    let window = p.window.unwrap_or(8);
    let depth = p.depth.unwrap_or(8);
    r.param("order", order);
    r.param("window", window);
    r.param("depth", depth);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let x = Arc::new(Bimodule::random(2, 1, &mut rng));
    let pair = PairOfBFaces::random(x, 2, 2, 2, &mut rng);
    let rep = conjugation_check(&pair, window, depth, order)?;
    let g = r.group("joint distribution");
    g.checked += rep.words_checked;
    g.failed += rep.distribution_mismatches.len();
    for m in &rep.distribution_mismatches {
        r.failures.push(Record {
            group: "joint distribution".into(),
            instance: format!("chi={} word={:?}", m.chi, m.word),
            lhs: m.lhs.to_string(),
            rhs: m.rhs.to_string(),
        });
    }
    r.sweep("bi-freeness of original and conjugated", &rep.bifree);
    Ok(r)
}

fn commuting_faces(p: &SuiteParams) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(12, p.seed);
    let order = p.max_n.unwrap_or(4);
    let depth = p.depth.unwrap_or(order);
    r.param("order", order);
    r.param("depth", depth);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for d in [2, 1] {
        let elems = [random_m2(d, 2, &mut rng), random_m2(d, 2, &mut rng)];
        for (label, dependent) in [("free", false), ("dependent", true)] {
            let c = if dependent {
                CommutingFaces::dependent(d, &elems, depth)?
            } else {
                CommutingFaces::free(d, &elems, depth)?
            };
            let rep = commuting_faces_check(&c, order)?;
            let tag = format!("d={d} {label}");
            let (f, b) = (rep.freeness.is_clean(), rep.bifreeness.is_clean());
            let details = format!(
                "freeness mismatches {} of {}, bi-freeness mismatches {} of {}",
                rep.freeness.mismatches.len(),
                rep.freeness.checked(),
                rep.bifreeness.mismatches.len(),
                rep.bifreeness.checked()
            );
            r.truth(&format!("{tag}: freeness iff bi-freeness"), &details, rep.equivalence_holds());
            r.truth(&format!("{tag}: expected outcome"), &details, if dependent { !f && !b } else { f && b });
        }
    }
    Ok(r)
}

/// Plain-text form: header, one line per group, then failures.
pub fn render_report(r: &SuiteReport) -> String {
    let mut out = format!("suite {} ({}) seed={}\n", r.number, r.suite, r.seed);
    for (k, v) in &r.params {
        out.push_str(&format!("  param {k} = {v}\n"));
    }
    for g in &r.groups {
        out.push_str(&format!(
            "  {:<48} checked {:>7}  failed {:>5}  {}\n",
            g.group,
            g.checked,
            g.failed,
            if g.failed == 0 { "ok" } else { "FAIL" }
        ));
    }
    for f in &r.failures {
        out.push_str(&format!("  mismatch [{}] {}: lhs={} rhs={}\n", f.group, f.instance, f.lhs, f.rhs));
    }
    out.push_str(&format!("  result: {}\n", if r.passed() { "pass" } else { "FAIL" }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_numbers() {
        assert_eq!(suite_number("haar").unwrap(), 11);
        assert_eq!(suite_number("3").unwrap(), 3);
        assert!(suite_number("13").is_err());
        assert!(suite_number("nope").is_err());
        for (i, s) in SUITES.iter().enumerate() {
            assert_eq!(s.0 as usize, i + 1);
        }
    }

    #[test]
    fn small_runs_are_deterministic() {
        let p = SuiteParams { seed: 3, max_n: Some(3), ..Default::default() };
        for k in [1, 2, 3, 8] {
            let a = run_suite(k, &p).unwrap();
            let b = run_suite(k, &p).unwrap();
            assert!(a.passed(), "{}", render_report(&a));
            assert_eq!(render_report(&a), render_report(&b));
        }
    }

    #[test]
    fn cuts_and_inner_intervals() {
        let c = SideMap::parse("lrlllrrl").unwrap();
        let p4 = BncPartition::parse("1,2,6|3,7|4,5,8", &c).unwrap();
        let vs = inner_intervals(&p4);
        let mut sets: Vec<Vec<usize>> = vs
            .iter()
            .map(|v| {
                let mut v = v.clone();
                v.sort();
                v
            })
            .collect();
        sets.sort();
        assert!(sets.contains(&vec![2, 3, 4, 6, 7]));
        assert!(sets.contains(&vec![3, 4, 7]));
        let zero = BncPartition::zero(&c);
        assert_eq!(valid_cuts(&zero).len(), 7);
        assert!(valid_cuts(&BncPartition::one(&c)).is_empty());
    }
}
