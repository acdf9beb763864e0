//! Shaded LR diagrams built by the top-prepend recursion, their lateral
//! refinements, and the two-sums identity.
//!
//! Nodes are added from the bottom (position n) up. A new node on the left
//! can only attach to the leftmost string reaching the top and a node on the
//! right only to the rightmost one, the same factors that λ_k and ρ_k act on
//! in a reduced free product.

use crate::bnc_core::{enumerate_bnc, lateral_refines, BncPartition, SetPartition, ShadingMap, Side, SideMap};
use crate::error::{Error, Result};
use crate::incidence::mobius_product;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

pub const DEFAULT_LR_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LrString {
    /// Increasing, 0-based.
    pub nodes: Vec<usize>,
    pub shade: usize,
    pub reaches_top: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LrDiagram {
    #[serde(serialize_with = "ser_display")]
    chi: SideMap,
    #[serde(serialize_with = "ser_display")]
    eps: ShadingMap,
    /// Sorted by first node.
    strings: Vec<LrString>,
    /// Indices into `strings` of the top-reaching strings, left to right.
    top_order: Vec<usize>,
}

fn ser_display<T: fmt::Display, S: serde::Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl LrDiagram {
    /// Validates that the strings arise from the recursion.
    pub fn new(chi: SideMap, eps: ShadingMap, strings: Vec<LrString>, top_order: Vec<usize>) -> Result<Self> {
        let d = Self::canonical(chi, eps, strings, top_order)?;
        if !d.is_recursive() {
            return Err(Error::Precondition("strings do not arise from the LR recursion".into()));
        }
        Ok(d)
    }

    fn canonical(chi: SideMap, eps: ShadingMap, strings: Vec<LrString>, top_order: Vec<usize>) -> Result<Self> {
        let n = chi.len();
        if eps.len() != n {
            return Err(Error::Arity { expected: n, got: eps.len() });
        }
        let blocks: Vec<Vec<usize>> = strings.iter().map(|s| s.nodes.clone()).collect();
        SetPartition::from_blocks(n, blocks)?;
        for s in &strings {
            if s.nodes.iter().any(|&k| eps.label(k) != s.shade) {
                return Err(Error::Precondition("a string meets a node of another shade".into()));
            }
        }
        let flagged: BTreeSet<usize> = (0..strings.len()).filter(|&i| strings[i].reaches_top).collect();
        if top_order.iter().copied().collect::<BTreeSet<_>>() != flagged || top_order.len() != flagged.len() {
            return Err(Error::Precondition("top order must list each top-reaching string once".into()));
        }
        let mut strings = strings;
        for s in strings.iter_mut() {
            s.nodes.sort_unstable();
        }
        let mut idx: Vec<usize> = (0..strings.len()).collect();
        idx.sort_by_key(|&i| strings[i].nodes.clone());
        let mut pos = vec![0; strings.len()];
        for (new, &old) in idx.iter().enumerate() {
            pos[old] = new;
        }
        let sorted = idx.iter().map(|&i| strings[i].clone()).collect();
        Ok(LrDiagram { chi, eps, strings: sorted, top_order: top_order.iter().map(|&i| pos[i]).collect() })
    }

    /// Replays the recursion from the bottom node up.
    fn is_recursive(&self) -> bool {
        let n = self.n();
        let owner = self.owner();
        let mut top: Vec<usize> = vec![];
        for k in (0..n).rev() {
            let s = owner[k];
            let string = &self.strings[s];
            let side = self.chi.side(k);
            let adjacent = match side {
                Side::Left => top.first(),
                Side::Right => top.last(),
            }
            .copied();
            let below = *string.nodes.last().unwrap() != k;
            if below {
                if adjacent != Some(s) {
                    return false;
                }
            } else {
                if adjacent.is_some_and(|a| self.strings[a].shade == self.eps.label(k)) {
                    return false;
                }
                match side {
                    Side::Left => top.insert(0, s),
                    Side::Right => top.push(s),
                }
            }
            let extends = string.nodes[0] != k || string.reaches_top;
            if !extends {
                top.retain(|&x| x != s);
            }
        }
        top == self.top_order
    }

    fn owner(&self) -> Vec<usize> {
        let mut owner = vec![0; self.n()];
        for (i, s) in self.strings.iter().enumerate() {
            for &k in &s.nodes {
                owner[k] = i;
            }
        }
        owner
    }

    pub fn chi(&self) -> &SideMap {
        &self.chi
    }

    pub fn eps(&self) -> &ShadingMap {
        &self.eps
    }

    pub fn n(&self) -> usize {
        self.chi.len()
    }

    pub fn strings(&self) -> &[LrString] {
        &self.strings
    }

    pub fn top_order(&self) -> &[usize] {
        &self.top_order
    }

    /// Number of strings reaching the top.
    pub fn stratum(&self) -> usize {
        self.top_order.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.strings.len()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.strings.iter().map(|s| s.nodes.clone()).collect()
    }

    pub fn partition(&self) -> SetPartition {
        SetPartition::from_blocks(self.n(), self.blocks()).expect("strings partition the nodes")
    }

    /// D₂ ≤_lat D₁: D₂ arises from D₁ by cutting spines between ribs. The
    /// piece above each cut keeps the top connection.
    pub fn lateral_leq(&self, other: &LrDiagram) -> bool {
        if self.chi != other.chi || self.eps != other.eps || self.stratum() != other.stratum() {
            return false;
        }
        if !lateral_refines(&self.partition(), &other.partition()) {
            return false;
        }
        let owner = self.owner();
        let mapped: Vec<usize> = other.top_order.iter().map(|&i| owner[other.strings[i].nodes[0]]).collect();
        mapped == self.top_order
    }

    /// Every diagram obtained by cutting spines between consecutive ribs.
    pub fn lateral_refinements(&self) -> Vec<LrDiagram> {
        let mut out = vec![(vec![], vec![None; self.strings.len()])];
        for (i, s) in self.strings.iter().enumerate() {
            let gaps = s.nodes.len() - 1;
            let mut next = vec![];
            for (partial, heads) in &out {
                for mask in 0..1u32 << gaps {
                    let mut strings: Vec<LrString> = partial.clone();
                    let mut heads: Vec<Option<usize>> = heads.clone();
                    let mut cur = vec![s.nodes[0]];
                    let mut first = true;
                    for g in 0..gaps {
                        if mask >> g & 1 == 1 {
                            let reaches_top = first && s.reaches_top;
                            if first {
                                heads[i] = Some(strings.len());
                            }
                            strings.push(LrString { nodes: std::mem::take(&mut cur), shade: s.shade, reaches_top });
                            first = false;
                        }
                        cur.push(s.nodes[g + 1]);
                    }
                    if first {
                        heads[i] = Some(strings.len());
                    }
                    strings.push(LrString { nodes: cur, shade: s.shade, reaches_top: first && s.reaches_top });
                    next.push((strings, heads));
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|(strings, heads)| {
                let top = self.top_order.iter().map(|&i| heads[i].unwrap()).collect();
                Self::canonical(self.chi.clone(), self.eps.clone(), strings, top).expect("cuts keep validity")
            })
            .collect()
    }

    fn key(&self) -> (Vec<LrString>, Vec<usize>) {
        (self.strings.clone(), self.top_order.clone())
    }
}

impl fmt::Display for LrDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .strings
            .iter()
            .map(|s| {
                let nodes: Vec<String> = s.nodes.iter().map(|k| (k + 1).to_string()).collect();
                format!("{}:{}{}", nodes.join(","), s.shade, if s.reaches_top { "^" } else { "" })
            })
            .collect();
        write!(f, "{}", parts.join(" | "))?;
        if !self.top_order.is_empty() {
            let top: Vec<String> = self.top_order.iter().map(|&i| (self.strings[i].nodes[0] + 1).to_string()).collect();
            write!(f, "  top {}", top.join(" "))?;
        }
        Ok(())
    }
}

/// LR(χ, ε), all 2ⁿ diagrams.
pub fn enumerate_lr(chi: &SideMap, eps: &ShadingMap) -> Result<Vec<LrDiagram>> {
    enumerate_lr_with_limit(chi, eps, DEFAULT_LR_LIMIT)
}

pub fn enumerate_lr_with_limit(chi: &SideMap, eps: &ShadingMap, limit: usize) -> Result<Vec<LrDiagram>> {
    let n = chi.len();
    if eps.len() != n {
        return Err(Error::Arity { expected: n, got: eps.len() });
    }
    if n > limit {
        return Err(Error::LimitExceeded { n, limit, count: 1u64 << n.min(63) });
    }
    // (strings as node lists with shade, top string ids left to right)
    type State = (Vec<(Vec<usize>, usize)>, Vec<usize>);
    let mut states: Vec<State> = vec![(vec![], vec![])];
    for k in (0..n).rev() {
        let side = chi.side(k);
        let shade = eps.label(k);
        let mut next = Vec::with_capacity(states.len() * 2);
        for (strings, top) in states {
            let adjacent = match side {
                Side::Left => top.first(),
                Side::Right => top.last(),
            }
            .copied()
            .filter(|&a| strings[a].1 == shade);
            let (mut strings, mut top) = (strings, top);
            let s = match adjacent {
                Some(a) => {
                    strings[a].0.push(k);
                    a
                }
                None => {
                    strings.push((vec![k], shade));
                    let s = strings.len() - 1;
                    match side {
                        Side::Left => top.insert(0, s),
                        Side::Right => top.push(s),
                    }
                    s
                }
            };
            let mut closed = top.clone();
            closed.retain(|&x| x != s);
            next.push((strings.clone(), closed));
            next.push((strings, top));
        }
        states = next;
    }
    let mut out: Vec<LrDiagram> = states
        .into_iter()
        .map(|(strings, top)| {
            let strings = strings
                .into_iter()
                .enumerate()
                .map(|(i, (nodes, shade))| LrString { nodes, shade, reaches_top: top.contains(&i) })
                .collect();
            LrDiagram::canonical(chi.clone(), eps.clone(), strings, top).expect("recursion output is valid")
        })
        .collect();
    out.sort_by_key(|d| (d.stratum(), d.key()));
    Ok(out)
}

/// LR_k: diagrams with exactly k strings reaching the top.
pub fn stratum(diagrams: &[LrDiagram], k: usize) -> Vec<LrDiagram> {
    diagrams.iter().filter(|d| d.stratum() == k).cloned().collect()
}

/// The partition of a diagram in LR₀.
pub fn lr0_to_partition(d: &LrDiagram) -> Result<BncPartition> {
    if d.stratum() != 0 {
        return Err(Error::Precondition(format!("diagram has {} strings reaching the top", d.stratum())));
    }
    BncPartition::new(d.partition(), d.chi.clone())
}

/// Closure under lateral refinement, deduplicated and sorted.
pub fn lateral_closure(diagrams: &[LrDiagram]) -> Vec<LrDiagram> {
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for d in diagrams {
        for r in d.lateral_refinements() {
            if seen.insert((r.stratum(), r.key())) {
                out.push(r);
            }
        }
    }
    out.sort_by_key(|d| (d.stratum(), d.key()));
    out
}

/// Each D ∈ LR^lat(χ, ε) with Σ_{D′ ∈ LR_k, D′ ≥_lat D} (−1)^{|D|−|D′|}.
pub fn lateral_coefficients(chi: &SideMap, eps: &ShadingMap) -> Result<Vec<(LrDiagram, i64)>> {
    let lr = enumerate_lr(chi, eps)?;
    Ok(lateral_closure(&lr)
        .into_iter()
        .map(|d| {
            let c = lr
                .iter()
                .filter(|up| d.lateral_leq(up))
                .map(|up| if (d.num_blocks() - up.num_blocks()) % 2 == 0 { 1 } else { -1 })
                .sum();
            (d, c)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TwoSums {
    pub lhs: i64,
    pub rhs: i64,
}

impl TwoSums {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Σ_{σ ∈ LR₀, σ ≥_lat π} (−1)^{|π|−|σ|} against Σ_{π ≤ σ ≤ ε} μ(π, σ).
pub fn two_sums_check(pi: &BncPartition, eps: &ShadingMap) -> Result<TwoSums> {
    let chi = pi.chi();
    let eps_p = eps.as_partition();
    if eps.len() != chi.len() {
        return Err(Error::Arity { expected: chi.len(), got: eps.len() });
    }
    if !pi.partition().refines(&eps_p) {
        return Err(Error::NotRefinement { sigma: pi.partition().to_string(), pi: eps_p.to_string() });
    }
    let lhs = stratum(&enumerate_lr(chi, eps)?, 0)
        .iter()
        .map(|d| d.partition())
        .filter(|s| lateral_refines(pi.partition(), s))
        .map(|s| if (pi.num_blocks() - s.num_blocks()) % 2 == 0 { 1 } else { -1 })
        .sum();
    let rhs = enumerate_bnc(chi)?
        .iter()
        .filter(|s| pi.partition().refines(s.partition()) && s.partition().refines(&eps_p))
        .map(|s| mobius_product(pi, s))
        .sum();
    Ok(TwoSums { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lr(chi: &str, eps: &str) -> Vec<LrDiagram> {
        enumerate_lr(&SideMap::parse(chi).unwrap(), &ShadingMap::parse(eps).unwrap()).unwrap()
    }

    #[test]
    fn two_node_example() {
        let ds = lr("lr", "1,2");
        assert_eq!(ds.len(), 4);
        let zero = stratum(&ds, 0);
        assert_eq!(zero.len(), 1);
        assert_eq!(lr0_to_partition(&zero[0]).unwrap().to_string(), "1|2");
        assert_eq!(lateral_closure(&zero), zero);
    }

    #[test]
    fn three_node_example() {
        let ds = lr("rlr", "1,1,2");
        assert_eq!(ds.len(), 8);
        let zero: Vec<String> = stratum(&ds, 0).iter().map(|d| lr0_to_partition(d).unwrap().to_string()).collect();
        assert_eq!(zero, vec!["1|2|3", "1,2|3"]);
        let pi = BncPartition::zero(&SideMap::parse("rlr").unwrap());
        let ts = two_sums_check(&pi, &ShadingMap::parse("1,1,2").unwrap()).unwrap();
        assert_eq!(ts, TwoSums { lhs: 0, rhs: 0 });
    }

    #[test]
    fn empty_and_counts() {
        let empty = enumerate_lr(&SideMap::new(vec![]), &ShadingMap::new(vec![])).unwrap();
        assert_eq!(empty.len(), 1);
        assert_eq!(lr0_to_partition(&empty[0]).unwrap().n(), 0);
        for n in 1..=6 {
            for c in SideMap::all(n) {
                for e in ShadingMap::all(n, 2) {
                    let ds = enumerate_lr(&c, &e).unwrap();
                    assert_eq!(ds.len(), 1 << n);
                    let sizes: usize = (0..=n).map(|k| stratum(&ds, k).len()).sum();
                    assert_eq!(sizes, 1 << n);
                    for d in &ds {
                        assert!(d.is_recursive());
                        assert!(d.lateral_leq(d));
                    }
                }
            }
        }
        assert!(matches!(
            enumerate_lr(&SideMap::all_left(13), &ShadingMap::new(vec![0; 13])),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn distinct_shades_have_one_full_top_diagram() {
        for n in 1..=4 {
            for c in SideMap::all(n) {
                let e = ShadingMap::new((0..n).collect());
                assert_eq!(stratum(&enumerate_lr(&c, &e).unwrap(), n).len(), 1);
            }
        }
    }

    #[test]
    fn same_shade_pair_has_one_cut() {
        let ds = lr("ll", "1,1");
        let joined: Vec<LrDiagram> = stratum(&ds, 0).into_iter().filter(|d| d.num_blocks() == 1).collect();
        assert_eq!(joined.len(), 1);
        assert_eq!(lateral_closure(&joined).len(), 2);
    }

    #[test]
    fn lr0_injects_into_partitions_below_eps() {
        for n in 1..=5 {
            for c in SideMap::all(n) {
                for e in ShadingMap::all(n, 2) {
                    let zero = stratum(&enumerate_lr(&c, &e).unwrap(), 0);
                    let got: BTreeSet<SetPartition> = zero.iter().map(|d| lr0_to_partition(d).unwrap().partition().clone()).collect();
                    assert_eq!(got.len(), zero.len());
                    assert!(got.iter().all(|p| p.refines(&e.as_partition())));
                }
            }
        }
    }

    #[test]
    fn lr0_misses_partitions_that_skip_a_same_shade_string() {
        // A same-shade string at the top must be joined, so {1,3 | 2} with
        // one shade never arises.
        let c = SideMap::parse("lll").unwrap();
        let zero = stratum(&enumerate_lr(&c, &ShadingMap::new(vec![0; 3])).unwrap(), 0);
        assert_eq!(zero.len(), 4);
        assert!(zero.iter().all(|d| d.partition().to_string() != "1,3|2"));
    }

    #[test]
    fn lateral_orders_agree_on_lr0() {
        for n in 1..=5 {
            for c in SideMap::all(n) {
                let e = ShadingMap::new(vec![0; n]);
                let zero = stratum(&enumerate_lr(&c, &e).unwrap(), 0);
                for a in &zero {
                    for b in &zero {
                        assert_eq!(a.lateral_leq(b), lateral_refines(&a.partition(), &b.partition()));
                    }
                }
            }
        }
    }

    #[test]
    fn closure_keeps_strata_and_rejects_foreign_diagrams() {
        let ds = lr("lrl", "1,1,1");
        for d in lateral_closure(&ds) {
            assert!(ds.iter().any(|up| d.lateral_leq(up)));
        }
        let c = SideMap::parse("ll").unwrap();
        let e = ShadingMap::parse("1,1").unwrap();
        let shade = e.label(0);
        let ok = vec![
            LrString { nodes: vec![0], shade, reaches_top: false },
            LrString { nodes: vec![1], shade, reaches_top: false },
        ];
        assert!(LrDiagram::new(c.clone(), e.clone(), ok, vec![]).is_ok());
        let bad = vec![
            LrString { nodes: vec![0], shade, reaches_top: false },
            LrString { nodes: vec![1], shade, reaches_top: true },
        ];
        assert!(LrDiagram::new(c, e, bad, vec![1]).is_err());
    }

    #[test]
    fn two_sums_small_cases() {
        let c = SideMap::parse("lrr").unwrap();
        let e = ShadingMap::new(vec![0; 3]);
        assert_eq!(two_sums_check(&BncPartition::one(&c), &e).unwrap(), TwoSums { lhs: 1, rhs: 1 });
        let e2 = ShadingMap::parse("1,2,2").unwrap();
        assert!(two_sums_check(&BncPartition::one(&c), &e2).is_err());
        for n in 1..=4 {
            for c in SideMap::all(n) {
                for e in ShadingMap::all(n, 3) {
                    for p in enumerate_bnc(&c).unwrap() {
                        if p.partition().refines(&e.as_partition()) {
                            assert!(two_sums_check(&p, &e).unwrap().equal());
                        }
                    }
                }
            }
        }
    }
}
