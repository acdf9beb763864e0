//! Operator-valued bi-free moments E_π and cumulants κ_π, with the identities
//! they satisfy.

mod bimult;
mod convolution;
mod mixed;
pub mod plan;
mod products;
mod series;

pub use bimult::{
    bi_cumulant_expansion, bi_cumulant_expansion_all, bi_moment_collapse, cumulant_vanishes_on_b_entry, property_i, property_ii,
    property_iii, property_iv, Comparison, PropertyIv,
};
pub use convolution::multiplicative_convolution_scalar;
pub use mixed::{bifree_sweep, ChiFilter, FamilyGens, MixedEntry, OrderStats, SweepConfig, SweepReport};
pub use plan::{render, Evaluator, Expr, Plan, Term};
pub use products::{product_cumulant_rhs, product_tuple};
pub use series::{cumulant_series, moment_series, SeriesKey};
pub use bimult::ser_belem;

use crate::base_algebra::{b_zero, BElem, Bimodule, OperatorSpace};
use crate::bnc_core::{enumerate_bnc, BncPartition, SetPartition, ShadingMap, Side, SideMap};
use crate::error::{Error, Result};
use crate::incidence::mobius_product;
use crate::scalar::q;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Which bi-multiplicative function a check targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MomentKind {
    Moment,
    Cumulant,
}

/// Operators T₁,…,T_n on a shared space, with T_k meant for side χ(k).
pub struct OperatorTuple<S: OperatorSpace> {
    space: Arc<S>,
    chi: SideMap,
    ops: Vec<S::Op>,
}

impl<S: OperatorSpace> Clone for OperatorTuple<S> {
    fn clone(&self) -> Self {
        OperatorTuple { space: self.space.clone(), chi: self.chi.clone(), ops: self.ops.clone() }
    }
}

impl<S: OperatorSpace> std::fmt::Debug for OperatorTuple<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorTuple").field("chi", &self.chi.to_string()).finish_non_exhaustive()
    }
}

impl<S: OperatorSpace> OperatorTuple<S> {
    /// Without a side check; use when operators are sided by construction.
    pub fn new_unchecked(space: Arc<S>, chi: SideMap, ops: Vec<S::Op>) -> Result<Self> {
        if ops.len() != chi.len() {
            return Err(Error::Arity { expected: chi.len(), got: ops.len() });
        }
        Ok(OperatorTuple { space, chi, ops })
    }

    pub fn space(&self) -> &Arc<S> {
        &self.space
    }

    pub fn chi(&self) -> &SideMap {
        &self.chi
    }

    pub fn ops(&self) -> &[S::Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// (T₁,…,T_n)|_S for a sorted subset.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        OperatorTuple {
            space: self.space.clone(),
            chi: self.chi.restrict(subset),
            ops: subset.iter().map(|&i| self.ops[i].clone()).collect(),
        }
    }

    /// The tuple with T_k replaced.
    pub fn with_op(&self, k: usize, op: S::Op) -> Self {
        let mut t = self.clone();
        t.ops[k] = op;
        t
    }

    /// (…, T_qT_{q+1}, …) over χ|_{∖q}.
    pub fn fuse(&self, q: usize) -> Result<Self> {
        if q + 1 >= self.len() {
            return Err(Error::IndexOutOfRange { index: q, n: self.len() });
        }
        let mut ops = self.ops.clone();
        let right = ops.remove(q + 1);
        ops[q] = self.space.compose(&ops[q], &right);
        Ok(OperatorTuple { space: self.space.clone(), chi: self.chi.remove(q), ops })
    }

    fn check_arity(&self, pi: &BncPartition) -> Result<()> {
        if pi.chi() != &self.chi {
            if pi.n() != self.len() {
                return Err(Error::Arity { expected: pi.n(), got: self.len() });
            }
            return Err(Error::ChiMismatch);
        }
        Ok(())
    }
}

impl OperatorTuple<Bimodule> {
    /// Checks T_k ∈ L_{χ(k)}(X).
    pub fn new(space: Arc<Bimodule>, chi: SideMap, ops: Vec<<Bimodule as OperatorSpace>::Op>) -> Result<Self> {
        let t = Self::new_unchecked(space, chi, ops)?;
        for (k, op) in t.ops.iter().enumerate() {
            let ok = match t.chi.side(k) {
                Side::Left => t.space.is_left_operator(op),
                Side::Right => t.space.is_right_operator(op),
            };
            if !ok {
                return Err(Error::SideAdmissibility { position: k, side: t.chi.side(k).name() });
            }
        }
        Ok(t)
    }
}

fn bnc_cache() -> &'static Mutex<HashMap<SideMap, Arc<Vec<BncPartition>>>> {
    static CACHE: OnceLock<Mutex<HashMap<SideMap, Arc<Vec<BncPartition>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// BNC(χ), enumerated once per χ.
pub fn bnc_list(chi: &SideMap) -> Result<Arc<Vec<BncPartition>>> {
    if let Some(v) = bnc_cache().lock().unwrap().get(chi) {
        return Ok(v.clone());
    }
    let v = Arc::new(enumerate_bnc(chi)?);
    bnc_cache().lock().unwrap().insert(chi.clone(), v.clone());
    Ok(v)
}

/// E_π(T₁,…,T_n), asserting that every free L/R choice agrees.
pub fn e_pi<S: OperatorSpace>(pi: &BncPartition, t: &OperatorTuple<S>) -> Result<BElem> {
    t.check_arity(pi)?;
    Evaluator::new(t.space.as_ref(), &t.ops, true).eval(&plan::plan_for(pi))
}

/// κ_π = Σ_{σ≤π} E_σ μ(σ,π).
pub fn kappa_pi<S: OperatorSpace>(pi: &BncPartition, t: &OperatorTuple<S>) -> Result<BElem> {
    t.check_arity(pi)?;
    MomentTable::new(t, true)?.cumulant(pi)
}

/// Σ_{σ≤π} κ_σ.
pub fn moment_from_cumulants<S: OperatorSpace>(pi: &BncPartition, t: &OperatorTuple<S>) -> Result<BElem> {
    t.check_arity(pi)?;
    let table = MomentTable::new(t, true)?;
    let mut acc = b_zero(t.space.b_dim());
    for (i, s) in table.partitions.iter().enumerate() {
        if s.partition().refines(pi.partition()) {
            acc = &acc + &table.cumulant_at(i)?;
        }
    }
    Ok(acc)
}

/// E_σ for every σ ∈ BNC(χ) of one tuple, sharing subexpressions.
pub struct MomentTable {
    partitions: Arc<Vec<BncPartition>>,
    index: HashMap<SetPartition, usize>,
    moments: Vec<BElem>,
    d: usize,
}

impl MomentTable {
    pub fn new<S: OperatorSpace>(t: &OperatorTuple<S>, check: bool) -> Result<Self> {
        let partitions = bnc_list(&t.chi)?;
        let mut ev = Evaluator::new(t.space.as_ref(), &t.ops, check);
        let moments = partitions.iter().map(|p| ev.eval(&plan::plan_for(p))).collect::<Result<Vec<_>>>()?;
        let index = partitions.iter().enumerate().map(|(i, p)| (p.partition().clone(), i)).collect();
        Ok(MomentTable { partitions, index, moments, d: t.space.b_dim() })
    }

    pub fn partitions(&self) -> &[BncPartition] {
        &self.partitions
    }

    pub fn moments(&self) -> &[BElem] {
        &self.moments
    }

    pub fn moment(&self, pi: &BncPartition) -> Result<BElem> {
        Ok(self.moments[self.lookup(pi)?].clone())
    }

    fn lookup(&self, pi: &BncPartition) -> Result<usize> {
        self.index
            .get(pi.partition())
            .copied()
            .filter(|&i| self.partitions[i].chi() == pi.chi())
            .ok_or(Error::ChiMismatch)
    }

    pub fn cumulant(&self, pi: &BncPartition) -> Result<BElem> {
        self.cumulant_at(self.lookup(pi)?)
    }

    fn cumulant_at(&self, i: usize) -> Result<BElem> {
        let pi = &self.partitions[i];
        let mut acc = b_zero(self.d);
        for (j, s) in self.partitions.iter().enumerate() {
            if s.partition().refines(pi.partition()) {
                let m = mobius_product(s, pi);
                acc = &acc + &self.moments[j].scale(&q(m));
            }
        }
        Ok(acc)
    }

    /// κ_{1_χ}, using the cached μ(σ, 1_χ).
    pub fn top_cumulant(&self) -> Result<BElem> {
        let chi = self.partitions[0].chi();
        let mu = mobius_to_one(chi)?;
        let mut acc = b_zero(self.d);
        for (j, m) in mu.iter().enumerate() {
            if *m != 0 {
                acc = &acc + &self.moments[j].scale(&q(*m));
            }
        }
        Ok(acc)
    }

    /// Σ_π [Σ_{π≤σ≤ε} μ(π,σ)] E_π.
    pub fn universal_rhs(&self, eps: &ShadingMap) -> Result<BElem> {
        let chi = self.partitions[0].chi();
        let coef = universal_coefficients(chi, eps)?;
        let mut acc = b_zero(self.d);
        for (j, c) in coef.iter().enumerate() {
            if *c != 0 {
                acc = &acc + &self.moments[j].scale(&q(*c));
            }
        }
        Ok(acc)
    }
}

fn mobius_to_one(chi: &SideMap) -> Result<Arc<Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<SideMap, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(chi) {
        return Ok(v.clone());
    }
    let one = BncPartition::one(chi);
    let v: Arc<Vec<i64>> = Arc::new(bnc_list(chi)?.iter().map(|s| mobius_product(s, &one)).collect());
    cache.lock().unwrap().insert(chi.clone(), v.clone());
    Ok(v)
}

/// [Σ_{π≤σ≤ε} μ(π,σ)] for every π ∈ BNC(χ), in enumeration order, by direct
/// interval enumeration.
pub fn universal_coefficients(chi: &SideMap, eps: &ShadingMap) -> Result<Arc<Vec<i64>>> {
    type Key = (SideMap, SetPartition);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<i64>>>>> = OnceLock::new();
    if eps.len() != chi.len() {
        return Err(Error::Arity { expected: chi.len(), got: eps.len() });
    }
    let eps_p = eps.as_partition();
    let key = (chi.clone(), eps_p.clone());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let all = bnc_list(chi)?;
    let below_eps: Vec<&BncPartition> = all.iter().filter(|s| s.partition().refines(&eps_p)).collect();
    let v: Arc<Vec<i64>> = Arc::new(
        all.iter()
            .map(|pi| {
                below_eps
                    .iter()
                    .filter(|s| pi.partition().refines(s.partition()))
                    .map(|s| mobius_product(pi, s))
                    .sum()
            })
            .collect(),
    );
    cache.lock().unwrap().insert(key, v.clone());
    Ok(v)
}

/// The right-hand side of the universal moment polynomial for shading ε.
pub fn universal_rhs<S: OperatorSpace>(eps: &ShadingMap, t: &OperatorTuple<S>) -> Result<BElem> {
    MomentTable::new(t, true)?.universal_rhs(eps)
}

/// E(T₁⋯T_n) computed directly in the space.
pub fn joint_moment<S: OperatorSpace>(t: &OperatorTuple<S>) -> Result<BElem> {
    let refs: Vec<&S::Op> = t.ops.iter().collect();
    t.space.expect_word(&refs)
}

/// Φ_π(T) for Φ = E or κ.
pub fn phi<S: OperatorSpace>(kind: MomentKind, pi: &BncPartition, t: &OperatorTuple<S>) -> Result<BElem> {
    match kind {
        MomentKind::Moment => e_pi(pi, t),
        MomentKind::Cumulant => kappa_pi(pi, t),
    }
}

/// Symbolic trace of E_π.
pub fn trace(pi: &BncPartition, unicode: bool) -> String {
    render(&plan::plan_for(pi), unicode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_algebra::{b_one, random_belem};
    use crate::bnc_core::SideMap;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_tuple(chi: &SideMap, x: &Arc<Bimodule>, rng: &mut ChaCha8Rng) -> OperatorTuple<Bimodule> {
        let ops = chi
            .sides()
            .iter()
            .map(|s| match s {
                Side::Left => x.random_left_operator(2, rng),
                Side::Right => x.random_right_operator(2, rng),
            })
            .collect();
        OperatorTuple::new(x.clone(), chi.clone(), ops).unwrap()
    }

    fn setup(seed: u64) -> (Arc<Bimodule>, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (Arc::new(Bimodule::random(2, 1, &mut rng)), rng)
    }

    #[test]
    fn full_partition_is_joint_moment() {
        let (x, mut rng) = setup(1);
        for n in 1..=4 {
            for c in SideMap::all(n) {
                let t = random_tuple(&c, &x, &mut rng);
                assert_eq!(e_pi(&BncPartition::one(&c), &t).unwrap(), joint_moment(&t).unwrap());
            }
        }
    }

    #[test]
    fn nine_node_value_matches_the_nested_formula() {
        let (x, mut rng) = setup(2);
        let c = SideMap::parse("lrllrrlrr").unwrap();
        let p = BncPartition::parse("1,2|3,5,9|4,7|6,8", &c).unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let o = t.ops();
        let e = |ops: Vec<&crate::base_algebra::AOperator>| x.expect_word(&ops).unwrap();
        let e47 = e(vec![&o[3], &o[6]]);
        let e68 = e(vec![&o[5], &o[7]]);
        let (l47, r68) = (x.make_lb(&e47).unwrap(), x.make_rb(&e68).unwrap());
        let inner = e(vec![&o[2], &l47, &o[4], &r68, &o[8]]);
        let l_inner = x.make_lb(&inner).unwrap();
        let expected = e(vec![&o[0], &o[1], &l_inner]);
        assert_eq!(e_pi(&p, &t).unwrap(), expected);
    }

    #[test]
    fn two_node_examples() {
        let (x, mut rng) = setup(3);
        let c = SideMap::parse("ll").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let o = t.ops();
        let e2 = x.expectation(&o[1]).unwrap();
        let via_l = x.expect_word(&[&o[0], &x.make_lb(&e2).unwrap()]).unwrap();
        let via_r = x.expect_word(&[&o[0], &x.make_rb(&e2).unwrap()]).unwrap();
        assert_eq!(via_l, via_r);
        assert_eq!(e_pi(&BncPartition::zero(&c), &t).unwrap(), via_l);
        let k = kappa_pi(&BncPartition::one(&c), &t).unwrap();
        assert_eq!(k, &joint_moment(&t).unwrap() - &via_l);
        let one = SideMap::parse("r").unwrap();
        let t1 = random_tuple(&one, &x, &mut rng);
        assert_eq!(kappa_pi(&BncPartition::one(&one), &t1).unwrap(), x.expectation(&t1.ops()[0]).unwrap());
    }

    #[test]
    fn universal_rhs_examples() {
        let (x, mut rng) = setup(4);
        let c = SideMap::parse("lr").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let rhs = universal_rhs(&ShadingMap::parse("1,2").unwrap(), &t).unwrap();
        assert_eq!(rhs, e_pi(&BncPartition::zero(&c), &t).unwrap());
        for n in 1..=4 {
            for c in SideMap::all(n) {
                let t = random_tuple(&c, &x, &mut rng);
                let constant = ShadingMap::new(vec![0; n]);
                assert_eq!(universal_rhs(&constant, &t).unwrap(), joint_moment(&t).unwrap());
            }
        }
    }

    #[test]
    fn moments_and_cumulants_round_trip() {
        let (x, mut rng) = setup(5);
        for n in 1..=4 {
            for c in SideMap::all(n) {
                let t = random_tuple(&c, &x, &mut rng);
                let table = MomentTable::new(&t, true).unwrap();
                for p in table.partitions() {
                    assert_eq!(moment_from_cumulants(p, &t).unwrap(), table.moment(p).unwrap());
                }
                assert_eq!(table.top_cumulant().unwrap(), table.cumulant(&BncPartition::one(&c)).unwrap());
                let z = BncPartition::zero(&c);
                assert_eq!(table.cumulant(&z).unwrap(), table.moment(&z).unwrap());
            }
        }
    }

    #[test]
    fn side_admissibility_is_enforced() {
        let (x, mut rng) = setup(6);
        let c = SideMap::parse("lr").unwrap();
        let ops = vec![x.random_left_operator(2, &mut rng), x.random_left_operator(2, &mut rng)];
        let err = OperatorTuple::new(x.clone(), c.clone(), ops).unwrap_err();
        assert_eq!(err, Error::SideAdmissibility { position: 1, side: "right" });
        let t = random_tuple(&c, &x, &mut rng);
        let wrong = BncPartition::one(&SideMap::parse("lrl").unwrap());
        assert!(e_pi(&wrong, &t).is_err());
        let b = random_belem(2, 2, &mut rng);
        assert!(x.is_left_operator(&x.make_lb(&b).unwrap()));
        let _ = b_one(2);
    }
}
