//! The incidence algebra of BNC(χ) for one fixed χ: δ, ζ, μ, convolution
//! and partial Möbius inversion.

use crate::bnc_core::{
    enumerate_bnc, join_bnc, kreweras_nc, refines, side_permutation, BncPartition, SetPartition,
    SideMap,
};
use crate::error::{Error, Result};
use crate::scalar::{catalan, q, Q};
use num_traits::Zero;
use std::collections::HashMap;
use std::sync::Arc;

/// BNC(χ) with its order relation, indexed in enumeration order.
#[derive(Debug)]
pub struct BncPoset {
    chi: SideMap,
    elements: Vec<BncPartition>,
    index: HashMap<SetPartition, usize>,
    /// `up[a]` lists `(b, pair)` for every b ≥ a, sorted by b.
    up: Vec<Vec<(usize, usize)>>,
    pairs: Vec<(usize, usize)>,
}

impl BncPoset {
    pub fn new(chi: &SideMap) -> Result<Arc<Self>> {
        let elements = enumerate_bnc(chi)?;
        let index: HashMap<SetPartition, usize> =
            elements.iter().enumerate().map(|(i, p)| (p.partition().clone(), i)).collect();
        let mut up = vec![vec![]; elements.len()];
        let mut pairs = vec![];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                if pa.partition().refines(pb.partition()) {
                    up[a].push((b, pairs.len()));
                    pairs.push((a, b));
                }
            }
        }
        Ok(Arc::new(BncPoset { chi: chi.clone(), elements, index, up, pairs }))
    }

    pub fn chi(&self) -> &SideMap {
        &self.chi
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BncPartition] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &BncPartition {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &BncPartition) -> Result<usize> {
        if p.chi() != &self.chi {
            return Err(Error::ChiMismatch);
        }
        Ok(self.index[p.partition()])
    }

    /// Indices of every b ≥ a.
    pub fn above(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.up[a].iter().map(|&(b, _)| b)
    }

    /// Indices of every b ≤ a.
    pub fn below(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&b| self.leq(b, a))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.pair_index(a, b).is_some()
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn pair_index(&self, a: usize, b: usize) -> Option<usize> {
        let row = &self.up[a];
        row.binary_search_by_key(&b, |&(x, _)| x).ok().map(|i| row[i].1)
    }

    pub fn zero(&self) -> usize {
        self.index[BncPartition::zero(&self.chi).partition()]
    }

    pub fn one(&self) -> usize {
        self.index[BncPartition::one(&self.chi).partition()]
    }
}

/// A scalar function on the comparable pairs σ ≤ π of BNC(χ); zero on
/// every other pair.
#[derive(Clone, Debug)]
pub struct IntervalFunction {
    poset: Arc<BncPoset>,
    values: Vec<Q>,
}

impl PartialEq for IntervalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.poset.chi == other.poset.chi && self.values == other.values
    }
}

impl IntervalFunction {
    pub fn from_fn(poset: &Arc<BncPoset>, mut f: impl FnMut(&BncPartition, &BncPartition) -> Q) -> Self {
        let values = poset
            .pairs
            .iter()
            .map(|&(a, b)| f(&poset.elements[a], &poset.elements[b]))
            .collect();
        IntervalFunction { poset: poset.clone(), values }
    }

    pub fn delta(poset: &Arc<BncPoset>) -> Self {
        let values = poset.pairs.iter().map(|&(a, b)| q((a == b) as i64)).collect();
        IntervalFunction { poset: poset.clone(), values }
    }

    pub fn zeta(poset: &Arc<BncPoset>) -> Self {
        IntervalFunction { poset: poset.clone(), values: vec![q(1); poset.num_pairs()] }
    }

    /// μ via the interval factorization.
    pub fn mobius(poset: &Arc<BncPoset>) -> Self {
        Self::from_fn(poset, |s, p| q(mobius_product(s, p)))
    }

    /// μ via μ(σ,σ) = 1 and μ(σ,π) = −Σ_{σ≤ρ<π} μ(σ,ρ).
    pub fn mobius_recursive(poset: &Arc<BncPoset>) -> Self {
        let n = poset.len();
        let mut values = vec![q(0); poset.num_pairs()];
        for a in 0..n {
            // Fewer blocks means higher up; process targets bottom-up.
            let mut targets: Vec<usize> = poset.above(a).collect();
            targets.sort_by_key(|&b| std::cmp::Reverse(poset.elements[b].num_blocks()));
            for &b in &targets {
                let v = if a == b {
                    q(1)
                } else {
                    let mut s = q(0);
                    for &c in &targets {
                        if c != b && poset.leq(c, b) {
                            s += &values[poset.pair_index(a, c).unwrap()];
                        }
                    }
                    -s
                };
                values[poset.pair_index(a, b).unwrap()] = v;
            }
        }
        IntervalFunction { poset: poset.clone(), values }
    }

    pub fn poset(&self) -> &Arc<BncPoset> {
        &self.poset
    }

    pub fn get_index(&self, a: usize, b: usize) -> Q {
        self.poset.pair_index(a, b).map_or_else(Q::zero, |i| self.values[i].clone())
    }

    pub fn get(&self, sigma: &BncPartition, pi: &BncPartition) -> Result<Q> {
        Ok(self.get_index(self.poset.index_of(sigma)?, self.poset.index_of(pi)?))
    }

    pub fn set(&mut self, sigma: &BncPartition, pi: &BncPartition, v: Q) -> Result<()> {
        let (a, b) = (self.poset.index_of(sigma)?, self.poset.index_of(pi)?);
        let i = self
            .poset
            .pair_index(a, b)
            .ok_or_else(|| Error::NotRefinement { sigma: sigma.to_string(), pi: pi.to_string() })?;
        self.values[i] = v;
        Ok(())
    }

    /// (f∗g)(σ,π) = Σ_{σ≤ρ≤π} f(σ,ρ) g(ρ,π).
    pub fn convolve(&self, other: &IntervalFunction) -> Result<IntervalFunction> {
        if self.poset.chi != other.poset.chi {
            return Err(Error::ChiMismatch);
        }
        let p = &self.poset;
        let mut values = vec![q(0); p.num_pairs()];
        for a in 0..p.len() {
            for &(b, ab) in &p.up[a] {
                let fab = &self.values[ab];
                if fab.is_zero() {
                    continue;
                }
                for &(c, bc) in &p.up[b] {
                    let ac = p.pair_index(a, c).unwrap();
                    values[ac] += fab * &other.values[bc];
                }
            }
        }
        Ok(IntervalFunction { poset: p.clone(), values })
    }
}

pub fn delta(sigma: &BncPartition, pi: &BncPartition) -> Result<Q> {
    if sigma.chi() != pi.chi() {
        return Err(Error::ChiMismatch);
    }
    Ok(q((sigma == pi) as i64))
}

pub fn zeta(sigma: &BncPartition, pi: &BncPartition) -> Result<Q> {
    Ok(q(refines(sigma, pi)? as i64))
}

/// μ_BNC(σ, π).
pub fn mobius_bnc(sigma: &BncPartition, pi: &BncPartition) -> Result<Q> {
    if !refines(sigma, pi)? {
        return Err(Error::NotRefinement { sigma: sigma.to_string(), pi: pi.to_string() });
    }
    Ok(q(mobius_product(sigma, pi)))
}

/// Product formula, assuming σ ≤ π: in NC coordinates [σ, π] splits over
/// the blocks V of π, and [σ|_V, 1_V] ≅ [0, K(σ|_V)].
pub(crate) fn mobius_product(sigma: &BncPartition, pi: &BncPartition) -> i64 {
    let s = side_permutation(sigma.chi());
    mobius_nc(&s.to_nc(sigma.partition()), &s.to_nc(pi.partition()))
}

/// μ_NC(σ, π) for σ ≤ π non-crossing.
pub fn mobius_nc(sigma: &SetPartition, pi: &SetPartition) -> i64 {
    let mut m = 1i64;
    for v in pi.blocks() {
        let local = sigma.restrict(v).expect("sigma refines pi");
        for w in kreweras_nc(&local).blocks() {
            let k = w.len() - 1;
            let c = catalan(k) as i64;
            m *= if k % 2 == 0 { c } else { -c };
        }
    }
    m
}

/// Checks Σ_{σ≤τ≤π} f(τ) μ(τ,π) = Σ_{ω∨σ=π} g(ω), given tables `f` and `g`
/// indexed like `poset.elements()` with f(π) = Σ_{ρ≤π} g(ρ).
pub fn partial_mobius_inversion_check(
    poset: &BncPoset,
    f: &[Q],
    g: &[Q],
    sigma: &BncPartition,
    pi: &BncPartition,
) -> Result<bool> {
    let n = poset.len();
    if f.len() != n || g.len() != n {
        return Err(Error::Precondition(format!("tables must have {n} entries")));
    }
    for a in 0..n {
        let s: Q = poset.below(a).map(|b| &g[b]).sum();
        if s != f[a] {
            return Err(Error::Precondition(format!(
                "f({}) is not the sum of g below it",
                poset.elements[a]
            )));
        }
    }
    let (si, pj) = (poset.index_of(sigma)?, poset.index_of(pi)?);
    if !poset.leq(si, pj) {
        return Err(Error::NotRefinement { sigma: sigma.to_string(), pi: pi.to_string() });
    }
    let mut lhs = q(0);
    for t in poset.above(si) {
        if poset.leq(t, pj) {
            lhs += &f[t] * q(mobius_product(&poset.elements[t], pi));
        }
    }
    let mut rhs = q(0);
    for (w, omega) in poset.elements.iter().enumerate() {
        if &join_bnc(omega, sigma)? == pi {
            rhs += &g[w];
        }
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnc_core::{enumerate_nc, Side};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poset(c: &str) -> Arc<BncPoset> {
        BncPoset::new(&SideMap::parse(c).unwrap()).unwrap()
    }

    fn random_fn(p: &Arc<BncPoset>, rng: &mut ChaCha8Rng) -> IntervalFunction {
        IntervalFunction::from_fn(p, |_, _| q(rng.random_range(-5..=5)))
    }

    fn small_chis(max: usize) -> Vec<SideMap> {
        (1..=max).flat_map(SideMap::all).collect()
    }

    #[test]
    fn delta_zeta_examples() {
        let c = SideMap::parse("llr").unwrap();
        let (z, o) = (BncPartition::zero(&c), BncPartition::one(&c));
        assert_eq!(delta(&o, &o).unwrap(), q(1));
        assert_eq!(zeta(&z, &o).unwrap(), q(1));
        assert_eq!(zeta(&o, &z).unwrap(), q(0));
        assert!(zeta(&z, &BncPartition::zero(&SideMap::parse("lll").unwrap())).is_err());
    }

    #[test]
    fn mobius_examples() {
        for (n, expected) in [(1, 1), (2, -1), (3, 2), (4, -5), (5, 14)] {
            for c in SideMap::all(n) {
                let m = mobius_bnc(&BncPartition::zero(&c), &BncPartition::one(&c)).unwrap();
                assert_eq!(m, q(expected));
            }
        }
        let c = SideMap::parse("llrlr").unwrap();
        let p = BncPartition::parse("1,3|2,4,5", &c).unwrap();
        assert_eq!(mobius_bnc(&p, &p).unwrap(), q(1));
        assert!(mobius_bnc(&BncPartition::one(&c), &p).is_err());
    }

    #[test]
    fn product_formula_matches_recursive_inversion() {
        for c in small_chis(6) {
            let p = BncPoset::new(&c).unwrap();
            assert_eq!(IntervalFunction::mobius(&p), IntervalFunction::mobius_recursive(&p), "chi = {c}");
        }
    }

    #[test]
    fn mobius_is_inverse_of_zeta() {
        for c in small_chis(6) {
            let p = BncPoset::new(&c).unwrap();
            let (m, z, d) = (IntervalFunction::mobius(&p), IntervalFunction::zeta(&p), IntervalFunction::delta(&p));
            assert_eq!(m.convolve(&z).unwrap(), d);
            assert_eq!(z.convolve(&m).unwrap(), d);
        }
    }

    #[test]
    fn mobius_transports_to_nc() {
        // The NC side uses its own poset on all-left χ, where s_χ is the
        // identity, and recursive inversion.
        for n in 1..=6 {
            let nc = BncPoset::new(&SideMap::all_left(n)).unwrap();
            let mu_nc = IntervalFunction::mobius_recursive(&nc);
            for c in SideMap::all(n) {
                let s = side_permutation(&c);
                let p = BncPoset::new(&c).unwrap();
                let mu = IntervalFunction::mobius(&p);
                for &(a, b) in p.pairs() {
                    let ta = BncPartition::new(s.to_nc(p.element(a).partition()), nc.chi().clone()).unwrap();
                    let tb = BncPartition::new(s.to_nc(p.element(b).partition()), nc.chi().clone()).unwrap();
                    assert_eq!(mu.get_index(a, b), mu_nc.get(&ta, &tb).unwrap());
                }
            }
        }
    }

    #[test]
    fn zeta_squared_counts_intervals() {
        for c in small_chis(5) {
            let p = BncPoset::new(&c).unwrap();
            let z = IntervalFunction::zeta(&p);
            let zz = z.convolve(&z).unwrap();
            for &(a, b) in p.pairs() {
                let count = p.above(a).filter(|&r| p.leq(r, b)).count();
                assert_eq!(zz.get_index(a, b), q(count as i64));
            }
        }
    }

    #[test]
    fn delta_is_the_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for c in small_chis(5) {
            let p = BncPoset::new(&c).unwrap();
            let f = random_fn(&p, &mut rng);
            let d = IntervalFunction::delta(&p);
            assert_eq!(f.convolve(&d).unwrap(), f);
            assert_eq!(d.convolve(&f).unwrap(), f);
        }
    }

    #[test]
    fn convolution_chi_mismatch() {
        let (a, b) = (poset("lr"), poset("rl"));
        let e = IntervalFunction::delta(&a).convolve(&IntervalFunction::delta(&b));
        assert_eq!(e, Err(Error::ChiMismatch));
    }

    #[test]
    fn nc_mobius_full_interval() {
        for n in 1..=7 {
            let z = SetPartition::finest(n);
            let o = SetPartition::coarsest(n);
            let expected = catalan(n - 1) as i64 * if n % 2 == 1 { 1 } else { -1 };
            assert_eq!(mobius_nc(&z, &o), expected);
            assert_eq!(enumerate_nc(n).len() as u64, catalan(n));
        }
    }

    fn random_g(p: &BncPoset, rng: &mut ChaCha8Rng) -> (Vec<Q>, Vec<Q>) {
        let g: Vec<Q> = (0..p.len()).map(|_| q(rng.random_range(-9..=9))).collect();
        let f = (0..p.len()).map(|a| p.below(a).map(|b| &g[b]).sum()).collect();
        (f, g)
    }

    #[test]
    fn partial_inversion_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for c in small_chis(5) {
            let p = BncPoset::new(&c).unwrap();
            let (f, g) = random_g(&p, &mut rng);
            for &(s, t) in p.pairs() {
                assert!(partial_mobius_inversion_check(&p, &f, &g, p.element(s), p.element(t)).unwrap());
            }
        }
    }

    #[test]
    fn partial_inversion_special_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = poset("lrrl");
        let (f, g) = random_g(&p, &mut rng);
        let zero = p.element(p.zero()).clone();
        for pi in p.elements() {
            // σ = 0 is ordinary Möbius inversion: the sum is g(π).
            let lhs: Q = p
                .below(p.index_of(pi).unwrap())
                .map(|t| &f[t] * mobius_bnc(p.element(t), pi).unwrap())
                .sum();
            assert_eq!(lhs, g[p.index_of(pi).unwrap()]);
            assert!(partial_mobius_inversion_check(&p, &f, &g, &zero, pi).unwrap());
            assert!(partial_mobius_inversion_check(&p, &f, &g, pi, pi).unwrap());
        }
        let mut bad = f.clone();
        bad[0] += q(1);
        assert!(matches!(
            partial_mobius_inversion_check(&p, &bad, &g, &zero, &zero),
            Err(Error::Precondition(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn convolution_is_associative(bits in prop::collection::vec(any::<bool>(), 1..=5), seed in any::<u64>()) {
            let c = SideMap::new(bits.into_iter().map(|b| if b { Side::Right } else { Side::Left }).collect());
            let p = BncPoset::new(&c).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (f, g, h) = (random_fn(&p, &mut rng), random_fn(&p, &mut rng), random_fn(&p, &mut rng));
            let left = f.convolve(&g).unwrap().convolve(&h).unwrap();
            let right = f.convolve(&g.convolve(&h).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
