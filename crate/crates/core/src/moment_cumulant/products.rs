//! Cumulants whose entries are products of consecutive operators.

use super::{bnc_list, MomentTable, OperatorTuple};
use crate::base_algebra::{b_zero, BElem, OperatorSpace};
use crate::bnc_core::{hat_chi, hat_embed, join_bnc, BncPartition, SideMap};
use crate::error::{Error, Result};

/// (T₁⋯T_{k(1)}, …, T_{k(m−1)+1}⋯T_n) for cut points `groups`; each run
/// must stay on one side.
pub fn product_tuple<S: OperatorSpace>(t: &OperatorTuple<S>, groups: &[usize]) -> Result<OperatorTuple<S>> {
    if groups.last() != Some(&t.len()) {
        return Err(Error::MalformedGroups(format!("the last cut point must be n = {}", t.len())));
    }
    let m = groups.len().saturating_sub(1);
    hat_chi(&SideMap::all_left(m), groups)?;
    let mut sides = vec![];
    let mut ops = vec![];
    for p in 0..m {
        let run = groups[p]..groups[p + 1];
        let side = t.chi().side(run.start);
        if run.clone().any(|k| t.chi().side(k) != side) {
            return Err(Error::MalformedGroups(format!("run {} mixes left and right", p + 1)));
        }
        sides.push(side);
        ops.push(t.space().product(&t.ops()[run]));
    }
    OperatorTuple::new_unchecked(t.space().clone(), SideMap::new(sides), ops)
}

/// Σ_{σ ∈ BNC(χ), σ ∨ 0̂ = π̂} κ_σ(T₁,…,T_n).
pub fn product_cumulant_rhs<S: OperatorSpace>(
    pi: &BncPartition,
    groups: &[usize],
    t: &OperatorTuple<S>,
) -> Result<BElem> {
    let chi_hat = hat_chi(pi.chi(), groups)?;
    if &chi_hat != t.chi() {
        return Err(Error::MalformedGroups("grouping does not match the tuple's side map".into()));
    }
    let pi_hat = hat_embed(pi, groups)?;
    let zero_hat = hat_embed(&BncPartition::zero(pi.chi()), groups)?;
    let table = MomentTable::new(t, true)?;
    let mut acc = b_zero(t.space().b_dim());
    for sigma in bnc_list(t.chi())?.iter() {
        if join_bnc(sigma, &zero_hat)?.partition() == pi_hat.partition() {
            acc = &acc + &table.cumulant(sigma)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::super::{kappa_pi, tests::random_tuple};
    use super::*;
    use crate::base_algebra::Bimodule;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn compositions(n: usize) -> Vec<Vec<usize>> {
        (0..1u32 << (n - 1))
            .map(|mask| {
                let mut g = vec![0];
                g.extend((1..n).filter(|k| mask >> (k - 1) & 1 == 1));
                g.push(n);
                g
            })
            .collect()
    }

    #[test]
    fn two_into_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        let c = SideMap::parse("ll").unwrap();
        let t = random_tuple(&c, &x, &mut rng);
        let one = BncPartition::one(&SideMap::parse("l").unwrap());
        let lhs = kappa_pi(&one, &product_tuple(&t, &[0, 2]).unwrap()).unwrap();
        let rhs = product_cumulant_rhs(&one, &[0, 2], &t).unwrap();
        let direct = x.expect_word(&[&t.ops()[0], &t.ops()[1]]).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, direct);
    }

    #[test]
    fn all_groupings_up_to_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        for n in 1..=4 {
            for c in SideMap::all(n) {
                let t = random_tuple(&c, &x, &mut rng);
                for g in compositions(n) {
                    let Ok(pt) = product_tuple(&t, &g) else { continue };
                    for pi in bnc_list(pt.chi()).unwrap().iter() {
                        let lhs = kappa_pi(pi, &pt).unwrap();
                        assert_eq!(lhs, product_cumulant_rhs(pi, &g, &t).unwrap(), "{c} {g:?} {pi:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn malformed_groupings() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        let t = random_tuple(&SideMap::parse("lr").unwrap(), &x, &mut rng);
        assert!(matches!(product_tuple(&t, &[0, 2]), Err(Error::MalformedGroups(_))));
        assert!(matches!(product_tuple(&t, &[0, 0, 2]), Err(Error::MalformedGroups(_))));
        assert!(matches!(product_tuple(&t, &[0, 1]), Err(Error::MalformedGroups(_))));
    }
}
