//! Sweeps over generator words of several families: mixed cumulants and the
//! universal moment polynomials.

use super::{bimult::ser_belem, joint_moment, MomentTable, OperatorTuple};
use crate::base_algebra::{BElem, OperatorSpace};
use crate::bnc_core::{ShadingMap, Side, SideMap};
use crate::error::Result;
use serde::Serialize;
use std::sync::Arc;

/// Left and right generators of one family, all on a common space.
pub struct FamilyGens<S: OperatorSpace> {
    pub left: Vec<S::Op>,
    pub right: Vec<S::Op>,
}

impl<S: OperatorSpace> Clone for FamilyGens<S> {
    fn clone(&self) -> Self {
        FamilyGens { left: self.left.clone(), right: self.right.clone() }
    }
}

impl<S: OperatorSpace> FamilyGens<S> {
    pub fn new(left: Vec<S::Op>, right: Vec<S::Op>) -> Self {
        FamilyGens { left, right }
    }

    pub fn gens(&self, side: Side) -> &[S::Op] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// z′ + z″ generator by generator.
    pub fn sum(&self, space: &S, other: &Self) -> Self {
        let add = |a: &[S::Op], b: &[S::Op]| a.iter().zip(b).map(|(x, y)| space.add(x, y)).collect();
        FamilyGens { left: add(&self.left, &other.left), right: add(&self.right, &other.right) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChiFilter {
    All,
    /// Only χ ≡ ℓ, which tests freeness of the left generators alone.
    AllLeft,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub min_order: usize,
    pub max_order: usize,
    /// Words checked per order; larger orders are sampled with a fixed
    /// stride.
    pub budget: usize,
    pub filter: ChiFilter,
    pub universal: bool,
    pub check_choices: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { min_order: 1, max_order: 4, budget: 5000, filter: ChiFilter::All, universal: true, check_choices: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedEntry {
    pub chi: String,
    pub eps: String,
    /// Generator index at each position.
    pub word: Vec<usize>,
    pub quantity: &'static str,
    #[serde(serialize_with = "ser_belem")]
    pub lhs: BElem,
    #[serde(serialize_with = "ser_belem")]
    pub rhs: BElem,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OrderStats {
    pub order: usize,
    pub total: usize,
    pub checked: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub orders: Vec<OrderStats>,
    pub mismatches: Vec<MixedEntry>,
}

impl SweepReport {
    pub fn checked(&self) -> usize {
        self.orders.iter().map(|o| o.checked).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

type Instance = (SideMap, ShadingMap, Vec<usize>);

fn instances<S: OperatorSpace>(n: usize, families: &[FamilyGens<S>], filter: ChiFilter) -> Vec<Instance> {
    let chis = match filter {
        ChiFilter::All => SideMap::all(n),
        ChiFilter::AllLeft => vec![SideMap::all_left(n)],
    };
    let mut out = vec![];
    for chi in &chis {
        for eps in ShadingMap::all(n, families.len()) {
            if eps.is_constant() {
                continue;
            }
            let sizes: Vec<usize> = (0..n).map(|k| families[eps.label(k)].gens(chi.side(k)).len()).collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut word = vec![0; n];
            loop {
                out.push((chi.clone(), eps.clone(), word.clone()));
                let mut i = n;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    word[i] += 1;
                    if word[i] < sizes[i] {
                        break;
                    }
                    word[i] = 0;
                }
                if word.iter().all(|&w| w == 0) {
                    break;
                }
            }
        }
    }
    out
}

/// For every χ, non-constant ε and generator word up to the order bound:
/// κ_{1_χ} = 0 and, if enabled, E(T₁⋯T_n) equals the universal polynomial.
pub fn bifree_sweep<S: OperatorSpace>(
    space: &Arc<S>,
    families: &[FamilyGens<S>],
    cfg: &SweepConfig,
) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    let zero = crate::base_algebra::b_zero(space.b_dim());
    for n in cfg.min_order.max(1)..=cfg.max_order {
        let all = instances(n, families, cfg.filter);
        let total = all.len();
        let picked: Vec<&Instance> = if total <= cfg.budget {
            all.iter().collect()
        } else {
            (0..cfg.budget).map(|i| &all[i * total / cfg.budget]).collect()
        };
        for (chi, eps, word) in &picked {
            let ops = (0..n).map(|k| families[eps.label(k)].gens(chi.side(k))[word[k]].clone()).collect();
            let t = OperatorTuple::new_unchecked(space.clone(), chi.clone(), ops)?;
            let table = MomentTable::new(&t, cfg.check_choices)?;
            let entry = |quantity, lhs, rhs| MixedEntry {
                chi: chi.to_string(),
                eps: eps.to_string(),
                word: word.clone(),
                quantity,
                lhs,
                rhs,
            };
            let k = table.top_cumulant()?;
            if k != zero {
                report.mismatches.push(entry("mixed cumulant", k, zero.clone()));
            }
            if cfg.universal {
                let lhs = joint_moment(&t)?;
                let rhs = table.universal_rhs(eps)?;
                if lhs != rhs {
                    report.mismatches.push(entry("universal polynomial", lhs, rhs));
                }
            }
        }
        report.orders.push(OrderStats { order: n, total, checked: picked.len() });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_algebra::Bimodule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn word_enumeration_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let x = Arc::new(Bimodule::random(1, 1, &mut rng));
        let f = FamilyGens::<Bimodule>::new(
            vec![x.random_left_operator(2, &mut rng); 2],
            vec![x.random_right_operator(2, &mut rng); 2],
        );
        let fams = [f.clone(), f];
        // 2^n side maps, 2^n − 2 non-constant shadings, 2^n words.
        for n in 1..=3 {
            let expected = (1 << n) * ((1 << n) - 2) * (1 << n);
            assert_eq!(instances(n, &fams, ChiFilter::All).len(), expected);
        }
        assert_eq!(instances(2, &fams, ChiFilter::AllLeft).len(), 2 * 4);
    }

    #[test]
    fn same_family_twice_is_not_bifree() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        let f = FamilyGens::<Bimodule>::new(vec![x.random_left_operator(2, &mut rng)], vec![x.random_right_operator(2, &mut rng)]);
        let cfg = SweepConfig { max_order: 2, ..Default::default() };
        let report = bifree_sweep(&x, &[f.clone(), f], &cfg).unwrap();
        assert!(!report.is_clean());
        assert!(report.mismatches.iter().any(|m| m.word.len() == 2 && m.quantity == "mixed cumulant"));
    }

    #[test]
    fn budget_sampling_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let x = Arc::new(Bimodule::random(1, 1, &mut rng));
        let f = FamilyGens::<Bimodule>::new(vec![x.random_left_operator(2, &mut rng)], vec![x.random_right_operator(2, &mut rng)]);
        let cfg = SweepConfig { min_order: 3, max_order: 3, budget: 10, ..Default::default() };
        let a = bifree_sweep(&x, &[f.clone(), f.clone()], &cfg).unwrap();
        let b = bifree_sweep(&x, &[f.clone(), f], &cfg).unwrap();
        assert_eq!(a.orders[0].checked, 10);
        assert_eq!(a.orders[0].total, 8 * 6);
        assert_eq!(a.mismatches, b.mismatches);
    }
}
