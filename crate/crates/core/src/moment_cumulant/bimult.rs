//! Both sides of the bi-multiplicativity reductions and of the bi-moment and
//! bi-cumulant identities.

use super::{bnc_list, kappa_pi, phi, MomentKind, MomentTable, OperatorTuple};
use crate::base_algebra::{b_zero, BElem, OperatorSpace};
use crate::bnc_core::{collapse, restrict, side_permutation, BncPartition, Side};
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    #[serde(serialize_with = "ser_belem")]
    pub lhs: BElem,
    #[serde(serialize_with = "ser_belem")]
    pub rhs: BElem,
}

impl Comparison {
    pub fn equal(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn ser_belem<S: serde::Serializer>(b: &BElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&b.to_string())
}

/// Property (iv): both reductions and the unreduced value.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyIv {
    pub theta: usize,
    pub gamma: usize,
    pub lhs: BElem,
    pub via_theta: BElem,
    pub via_gamma: BElem,
}

impl PropertyIv {
    pub fn equal(&self) -> bool {
        self.lhs == self.via_theta && self.lhs == self.via_gamma
    }
}

fn mult<S: OperatorSpace>(space: &S, side: Side, b: &BElem) -> S::Op {
    match side {
        Side::Left => space.left_mult(b),
        Side::Right => space.right_mult(b),
    }
}

/// Property (i): Φ_π(T₁,…,T_nC_b) against the reduced form, where C = L or
/// R matches χ(n).
pub fn property_i<S: OperatorSpace>(
    kind: MomentKind,
    pi: &BncPartition,
    t: &OperatorTuple<S>,
    b: &BElem,
) -> Result<Comparison> {
    let n = t.len();
    if n == 0 {
        return Err(Error::Precondition("empty tuple".into()));
    }
    let sp = t.space().as_ref();
    let side = t.chi().side(n - 1);
    let last = sp.compose(&t.ops()[n - 1], &mult(sp, side, b));
    let lhs = phi(kind, pi, &t.with_op(n - 1, last))?;
    let q = (0..n).rev().find(|&k| t.chi().side(k) != side);
    let rhs = match q {
        Some(q) => {
            let moved = sp.compose(&t.ops()[q], &mult(sp, side.opposite(), b));
            phi(kind, pi, &t.with_op(q, moved))?
        }
        None => {
            let v = phi(kind, pi, t)?;
            match side {
                Side::Left => &v * b,
                Side::Right => b * &v,
            }
        }
    };
    Ok(Comparison { lhs, rhs })
}

/// Property (ii): Φ_π(…,C_bT_p,…) against the reduced form.
pub fn property_ii<S: OperatorSpace>(
    kind: MomentKind,
    pi: &BncPartition,
    t: &OperatorTuple<S>,
    p: usize,
    b: &BElem,
) -> Result<Comparison> {
    if p >= t.len() {
        return Err(Error::IndexOutOfRange { index: p, n: t.len() });
    }
    let sp = t.space().as_ref();
    let side = t.chi().side(p);
    let c = mult(sp, side, b);
    let lhs = phi(kind, pi, &t.with_op(p, sp.compose(&c, &t.ops()[p])))?;
    let rhs = match (0..p).rev().find(|&k| t.chi().side(k) == side) {
        Some(q) => phi(kind, pi, &t.with_op(q, sp.compose(&t.ops()[q], &c)))?,
        None => {
            let v = phi(kind, pi, t)?;
            match side {
                Side::Left => b * &v,
                Side::Right => &v * b,
            }
        }
    };
    Ok(Comparison { lhs, rhs })
}

fn is_chi_interval(ranks: &mut [usize]) -> bool {
    ranks.sort_unstable();
    ranks.windows(2).all(|w| w[1] == w[0] + 1)
}

fn check_union_of_blocks(pi: &BncPartition, set: &[usize]) -> Result<()> {
    pi.partition().restrict(set).map(|_| ())
}

/// Property (iii) for χ-intervals V₁,…,V_m partitioning the positions, each a
/// union of blocks. The factors are multiplied in ≺ order.
pub fn property_iii<S: OperatorSpace>(
    kind: MomentKind,
    pi: &BncPartition,
    t: &OperatorTuple<S>,
    intervals: &[Vec<usize>],
) -> Result<Comparison> {
    let n = t.len();
    let s = side_permutation(t.chi());
    let mut seen = vec![false; n];
    for v in intervals {
        if v.is_empty() {
            return Err(Error::Hypothesis("empty interval".into()));
        }
        for &x in v {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Hypothesis("intervals must partition the positions".into()));
            }
        }
        if !is_chi_interval(&mut v.iter().map(|&x| s.rank(x)).collect::<Vec<_>>()) {
            return Err(Error::Hypothesis(format!("{v:?} is not a χ-interval")));
        }
        check_union_of_blocks(pi, v)?;
    }
    if seen.iter().any(|&x| !x) {
        return Err(Error::Hypothesis("intervals must partition the positions".into()));
    }
    let mut order: Vec<&Vec<usize>> = intervals.iter().collect();
    order.sort_by_key(|v| v.iter().map(|&x| s.rank(x)).min());
    let lhs = phi(kind, pi, t)?;
    let mut rhs = crate::base_algebra::b_one(t.space().b_dim());
    for v in order {
        let mut v = v.clone();
        v.sort_unstable();
        rhs = &rhs * &phi(kind, &restrict(pi, &v)?, &t.restrict(&v))?;
    }
    Ok(Comparison { lhs, rhs })
}

/// Property (iv) for a χ-interval V, a union of blocks whose complement W
/// holds the ≺-extremes.
pub fn property_iv<S: OperatorSpace>(
    kind: MomentKind,
    pi: &BncPartition,
    t: &OperatorTuple<S>,
    v: &[usize],
) -> Result<PropertyIv> {
    let n = t.len();
    let s = side_permutation(t.chi());
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.iter().any(|&x| x >= n) || v.is_empty() {
        return Err(Error::Hypothesis("V must be a non-empty set of positions".into()));
    }
    let w: Vec<usize> = (0..n).filter(|x| v.binary_search(x).is_err()).collect();
    if !is_chi_interval(&mut v.iter().map(|&x| s.rank(x)).collect::<Vec<_>>()) {
        return Err(Error::Hypothesis("V is not a χ-interval".into()));
    }
    check_union_of_blocks(pi, &v)?;
    let (first, last) = (s.apply(0), s.apply(n - 1));
    if v.contains(&first) || v.contains(&last) {
        return Err(Error::Hypothesis("the ≺-minimum and ≺-maximum must lie in W".into()));
    }
    let vmin = v.iter().map(|&x| s.rank(x)).min().unwrap();
    let vmax = v.iter().map(|&x| s.rank(x)).max().unwrap();
    let theta = s.apply(vmin - 1);
    let gamma = s.apply(vmax + 1);

    let sp = t.space().as_ref();
    let lhs = phi(kind, pi, t)?;
    let val = phi(kind, &restrict(pi, &v)?, &t.restrict(&v))?;
    let pi_w = restrict(pi, &w)?;
    let at_theta = match t.chi().side(theta) {
        Side::Left => sp.compose(&t.ops()[theta], &sp.left_mult(&val)),
        Side::Right => sp.compose(&sp.right_mult(&val), &t.ops()[theta]),
    };
    let at_gamma = match t.chi().side(gamma) {
        Side::Left => sp.compose(&sp.left_mult(&val), &t.ops()[gamma]),
        Side::Right => sp.compose(&t.ops()[gamma], &sp.right_mult(&val)),
    };
    let via_theta = phi(kind, &pi_w, &t.with_op(theta, at_theta).restrict(&w))?;
    let via_gamma = phi(kind, &pi_w, &t.with_op(gamma, at_gamma).restrict(&w))?;
    Ok(PropertyIv { theta, gamma, lhs, via_theta, via_gamma })
}

fn check_same_side<S: OperatorSpace>(t: &OperatorTuple<S>, q: usize) -> Result<()> {
    if q + 1 >= t.len() {
        return Err(Error::IndexOutOfRange { index: q, n: t.len() });
    }
    if t.chi().side(q) != t.chi().side(q + 1) {
        return Err(Error::Hypothesis(format!("χ({}) ≠ χ({})", q + 1, q + 2)));
    }
    Ok(())
}

/// E_π(T) against E_{π|q=q+1}(…,T_qT_{q+1},…) for q ∼_π q+1 on one side.
pub fn bi_moment_collapse<S: OperatorSpace>(pi: &BncPartition, t: &OperatorTuple<S>, q: usize) -> Result<Comparison> {
    check_same_side(t, q)?;
    if !pi.partition().same_block(q, q + 1) {
        return Err(Error::Hypothesis(format!("{} and {} lie in different blocks", q + 1, q + 2)));
    }
    let lhs = super::e_pi(pi, t)?;
    let rhs = super::e_pi(&collapse(pi, q)?, &t.fuse(q)?)?;
    Ok(Comparison { lhs, rhs })
}

/// κ_π(…,T_qT_{q+1},…) against Σ_{σ|q=q+1 = π} κ_σ(T), with π over n − 1
/// positions.
pub fn bi_cumulant_expansion<S: OperatorSpace>(pi: &BncPartition, t: &OperatorTuple<S>, q: usize) -> Result<Comparison> {
    check_same_side(t, q)?;
    let fused = t.fuse(q)?;
    let lhs = kappa_pi(pi, &fused)?;
    let table = MomentTable::new(t, true)?;
    let mut rhs = b_zero(t.space().b_dim());
    for sigma in bnc_list(t.chi())?.iter() {
        if collapse(sigma, q)?.partition() == pi.partition() {
            rhs = &rhs + &table.cumulant(sigma)?;
        }
    }
    Ok(Comparison { lhs, rhs })
}

/// [`bi_cumulant_expansion`] for every π over n − 1 positions, sharing one
/// cumulant table.
pub fn bi_cumulant_expansion_all<S: OperatorSpace>(
    t: &OperatorTuple<S>,
    q: usize,
) -> Result<Vec<(BncPartition, Comparison)>> {
    check_same_side(t, q)?;
    let fused = t.fuse(q)?;
    let table = MomentTable::new(t, true)?;
    let fused_table = MomentTable::new(&fused, true)?;
    let mut sums: Vec<BElem> = vec![b_zero(t.space().b_dim()); fused_table.partitions().len()];
    for sigma in bnc_list(t.chi())?.iter() {
        let c = collapse(sigma, q)?;
        let i = fused_table.partitions().iter().position(|p| p.partition() == c.partition()).expect("collapse is bi-non-crossing");
        sums[i] = &sums[i] + &table.cumulant(sigma)?;
    }
    fused_table
        .partitions()
        .iter()
        .zip(sums)
        .map(|(pi, rhs)| Ok((pi.clone(), Comparison { lhs: fused_table.cumulant(pi)?, rhs })))
        .collect()
}

/// κ_{1_χ} with T_q replaced by L_b (left slot) or R_b (right slot).
pub fn cumulant_vanishes_on_b_entry<S: OperatorSpace>(t: &OperatorTuple<S>, q: usize, b: &BElem) -> Result<Comparison> {
    if t.len() < 2 {
        return Err(Error::Precondition("needs n ≥ 2".into()));
    }
    if q >= t.len() {
        return Err(Error::IndexOutOfRange { index: q, n: t.len() });
    }
    let sp = t.space().as_ref();
    let t2 = t.with_op(q, mult(sp, t.chi().side(q), b));
    let lhs = kappa_pi(&BncPartition::one(t.chi()), &t2)?;
    Ok(Comparison { lhs, rhs: b_zero(sp.b_dim()) })
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_tuple;
    use super::*;
    use crate::base_algebra::{b_one, random_belem, Bimodule};
    use crate::bnc_core::SideMap;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    const KINDS: [MomentKind; 2] = [MomentKind::Moment, MomentKind::Cumulant];

    fn setup(seed: u64) -> (Arc<Bimodule>, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (Arc::new(Bimodule::random(2, 1, &mut rng)), rng)
    }

    #[test]
    fn worked_example_for_i_and_ii() {
        let (x, mut rng) = setup(11);
        let c = SideMap::parse("llrlr").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let b: Vec<BElem> = (0..3).map(|_| random_belem(2, 3, &mut rng)).collect();
        let o = t.ops();
        let lhs_ops = vec![
            o[0].clone(),
            x.make_lb(&b[0]).unwrap().compose(&o[1]),
            x.make_rb(&b[1]).unwrap().compose(&o[2]),
            o[3].clone(),
            o[4].compose(&x.make_rb(&b[2]).unwrap()),
        ];
        let rhs_ops = vec![
            o[0].compose(&x.make_lb(&b[0]).unwrap()),
            o[1].clone(),
            o[2].clone(),
            o[3].compose(&x.make_lb(&b[2]).unwrap()),
            o[4].clone(),
        ];
        for pi in bnc_list(&c).unwrap().iter() {
            for kind in KINDS {
                let l = phi(kind, pi, &OperatorTuple::new(x.clone(), c.clone(), lhs_ops.clone()).unwrap()).unwrap();
                let r = phi(kind, pi, &OperatorTuple::new(x.clone(), c.clone(), rhs_ops.clone()).unwrap()).unwrap();
                assert_eq!(l, &r * &b[1]);
            }
        }
    }

    #[test]
    fn worked_example_for_iii_and_iv() {
        let (x, mut rng) = setup(12);
        let c = SideMap::parse("lrlllrrl").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let p3 = BncPartition::parse("1,3,4|2,6|5,7,8", &c).unwrap();
        let p4 = BncPartition::parse("1,2,6|3,7|4,5,8", &c).unwrap();
        let iv = |v: &[usize]| v.iter().map(|x| x - 1).collect::<Vec<_>>();
        for kind in KINDS {
            let r = property_iii(kind, &p3, &t, &[iv(&[1, 3, 4]), iv(&[5, 7, 8]), iv(&[2, 6])]).unwrap();
            assert!(r.equal());
            let r = property_iv(kind, &p4, &t, &iv(&[3, 4, 5, 7, 8])).unwrap();
            assert_eq!((r.theta, r.gamma), (0, 5));
            assert!(r.equal());
            let r = property_iv(kind, &p4, &t, &iv(&[4, 5, 8])).unwrap();
            assert_eq!((r.theta, r.gamma), (2, 6));
            assert!(r.equal());
        }
        assert!(property_iv(MomentKind::Moment, &p4, &t, &[0, 1, 5]).is_err());
        assert!(property_iii(MomentKind::Moment, &p3, &t, &[iv(&[1, 3]), iv(&[4, 5, 7, 8]), iv(&[2, 6])]).is_err());
    }

    #[test]
    fn i_and_ii_hold_for_every_partition() {
        let (x, mut rng) = setup(13);
        for n in 1..=4 {
            for c in SideMap::all(n) {
                let t = random_tuple(&c, &x, &mut rng);
                let b = random_belem(2, 3, &mut rng);
                let p = rng.random_range(0..n);
                for pi in bnc_list(&c).unwrap().iter() {
                    for kind in KINDS {
                        assert!(property_i(kind, pi, &t, &b).unwrap().equal());
                        assert!(property_ii(kind, pi, &t, p, &b).unwrap().equal());
                    }
                }
                let one = property_i(MomentKind::Moment, &BncPartition::one(&c), &t, &b_one(2)).unwrap();
                assert!(one.equal());
            }
        }
    }

    #[test]
    fn vanishing_and_bi_moment_identities() {
        let (x, mut rng) = setup(14);
        for n in 2..=4 {
            for c in SideMap::all(n) {
                let t = random_tuple(&c, &x, &mut rng);
                let b = random_belem(2, 3, &mut rng);
                for q in 0..n {
                    assert!(cumulant_vanishes_on_b_entry(&t, q, &b).unwrap().lhs.is_zero());
                }
                for q in 0..n - 1 {
                    if c.side(q) != c.side(q + 1) {
                        assert!(matches!(bi_cumulant_expansion(&BncPartition::one(&c.remove(q)), &t, q), Err(Error::Hypothesis(_))));
                        continue;
                    }
                    for pi in bnc_list(&c).unwrap().iter().filter(|p| p.partition().same_block(q, q + 1)) {
                        assert!(bi_moment_collapse(pi, &t, q).unwrap().equal());
                    }
                    for pi in bnc_list(&c.remove(q)).unwrap().iter() {
                        assert!(bi_cumulant_expansion(pi, &t, q).unwrap().equal());
                    }
                }
            }
        }
    }

    #[test]
    fn shared_table_expansion_matches() {
        let (x, mut rng) = setup(16);
        let c = SideMap::parse("llrl").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let all = bi_cumulant_expansion_all(&t, 0).unwrap();
        assert_eq!(all.len(), 5);
        for (pi, cmp) in all {
            assert!(cmp.equal());
            assert_eq!(bi_cumulant_expansion(&pi, &t, 0).unwrap().lhs, cmp.lhs);
        }
    }

    #[test]
    fn two_point_base_case() {
        let (x, mut rng) = setup(15);
        let c = SideMap::parse("rr").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let fused = t.fuse(0).unwrap();
        let lhs = kappa_pi(&BncPartition::one(fused.chi()), &fused).unwrap();
        let rhs = &kappa_pi(&BncPartition::one(&c), &t).unwrap() + &kappa_pi(&BncPartition::zero(&c), &t).unwrap();
        assert_eq!(lhs, rhs);
    }
}
