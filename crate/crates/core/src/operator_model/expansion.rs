//! E_D on LR diagrams and the expansion of μ₁(T₁)⋯μ_n(T_n)1_B.

use super::{FpOp, FpVector, FreeProduct, Letter};
use crate::base_algebra::{AOperator, OperatorSpace};
use crate::bnc_core::{ShadingMap, Side, SideMap};
use crate::error::{Error, Result};
use crate::lr_diagrams::{lateral_coefficients, LrDiagram};
use crate::moment_cumulant::plan::{build_plan, Evaluator, Plan};
use serde::Serialize;

/// μ_k(T_k): λ_{ε(k)} on left positions and ρ_{ε(k)} on right ones.
pub fn mu_ops(fp: &FreeProduct, chi: &SideMap, eps: &ShadingMap, ops: &[AOperator]) -> Result<Vec<FpOp>> {
    if ops.len() != chi.len() || eps.len() != chi.len() {
        return Err(Error::Arity { expected: chi.len(), got: ops.len() });
    }
    (0..ops.len())
        .map(|k| match chi.side(k) {
            Side::Left => fp.lambda(eps.label(k), &ops[k]),
            Side::Right => fp.rho(eps.label(k), &ops[k]),
        })
        .collect()
}

/// u ⊗ v for u ∈ X̊_k; v may be any vector not starting in X̊_k.
fn tensor(fp: &FreeProduct, k: usize, u: &FpVector, v: &FpVector) -> Result<FpVector> {
    let mut out = FpVector::zero();
    for (w, a) in u.terms() {
        let &[(ku, i)] = w.as_slice() else {
            return Err(Error::Precondition("tensor factor is not a single-letter vector".into()));
        };
        debug_assert_eq!(ku, k);
        for (w2, c) in v.terms() {
            if w2.first().is_some_and(|l| l.0 == k) {
                return Err(Error::Precondition(format!("adjacent tensor factors share shade {k}")));
            }
            let mut prefix: Vec<Letter> = vec![(k, i)];
            fp.lmul_into(a, w2, c, &mut prefix, &mut out)?;
        }
    }
    Ok(out)
}

/// E_D(μ₁(T₁),…,μ_n(T_n)) for `ops` already lifted to the free product.
pub fn e_d(fp: &FreeProduct, d: &LrDiagram, ops: &[FpOp]) -> Result<FpVector> {
    if ops.len() != d.n() {
        return Err(Error::Arity { expected: d.n(), got: ops.len() });
    }
    if d.n() == 0 {
        return Ok(fp.vacuum());
    }
    let strings = d.blocks();
    let top: Vec<bool> = d.strings().iter().map(|s| s.reaches_top).collect();
    let mut ev = Evaluator::new(fp, ops, true);
    match build_plan(d.chi(), &strings, &top) {
        Plan::Closed(e) => Ok(FpVector::scalar(ev.eval(&e)?)),
        Plan::Open(words) => {
            let mut acc = FpVector::scalar(crate::base_algebra::b_one(fp.b_dim()));
            for &si in d.top_order().iter().rev() {
                let terms = &words
                    .iter()
                    .find(|(i, _)| *i == si)
                    .expect("top strings stay open")
                    .1;
                let u = ev.apply_terms(terms, fp.vacuum(), false)?.without_b_part();
                acc = tensor(fp, d.strings()[si].shade, &u, &acc)?;
            }
            Ok(acc)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub diagrams: usize,
    pub equal: bool,
}

/// Compares μ₁(T₁)⋯μ_n(T_n)1_B against Σ_D c_D·E_D.
pub fn expansion_check(fp: &FreeProduct, chi: &SideMap, eps: &ShadingMap, ops: &[AOperator]) -> Result<ExpansionReport> {
    let mu = mu_ops(fp, chi, eps, ops)?;
    let refs: Vec<&FpOp> = mu.iter().collect();
    let mut lhs = fp.vacuum();
    for t in refs.iter().rev() {
        lhs = fp.apply(t, &lhs)?;
    }
    let coeffs = lateral_coefficients(chi, eps)?;
    let mut rhs = FpVector::zero();
    let mut diagrams = 0;
    for (d, c) in &coeffs {
        if *c == 0 {
            continue;
        }
        diagrams += 1;
        rhs = rhs.add(&e_d(fp, d, &mu)?.scale(&crate::scalar::q(*c)));
    }
    Ok(ExpansionReport { diagrams, equal: lhs == rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_algebra::Bimodule;
    use crate::bnc_core::BncPartition;
    use crate::lr_diagrams::{enumerate_lr, lr0_to_partition};
    use crate::moment_cumulant::{e_pi, OperatorTuple};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn setup(seed: u64, depth: usize) -> (Arc<FreeProduct>, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps = (0..2).map(|_| Arc::new(Bimodule::random(2, 1, &mut rng))).collect();
        (Arc::new(FreeProduct::new(comps, depth).unwrap()), rng)
    }

    fn random_ops(fp: &FreeProduct, chi: &SideMap, eps: &ShadingMap, rng: &mut ChaCha8Rng) -> Vec<AOperator> {
        (0..chi.len())
            .map(|k| {
                let x = &fp.components()[eps.label(k)];
                match chi.side(k) {
                    Side::Left => x.random_left_operator(2, rng),
                    Side::Right => x.random_right_operator(2, rng),
                }
            })
            .collect()
    }

    #[test]
    fn one_node_diagrams() {
        let (fp, mut rng) = setup(1, 2);
        let chi = SideMap::parse("l").unwrap();
        let eps = ShadingMap::parse("0").unwrap();
        let ops = random_ops(&fp, &chi, &eps, &mut rng);
        let mu = mu_ops(&fp, &chi, &eps, &ops).unwrap();
        let t_xi = fp.apply(&mu[0], &fp.vacuum()).unwrap();
        for d in enumerate_lr(&chi, &eps).unwrap() {
            let v = e_d(&fp, &d, &mu).unwrap();
            if d.stratum() == 1 {
                assert_eq!(v, t_xi.without_b_part());
            } else {
                assert_eq!(v, FpVector::scalar(fp.project(&t_xi)));
            }
        }
        let r = expansion_check(&fp, &chi, &eps, &ops).unwrap();
        assert!(r.equal);
        assert_eq!(r.diagrams, 2);
    }

    #[test]
    fn lr0_diagrams_give_e_pi() {
        let (fp, mut rng) = setup(2, 4);
        for n in 1..=4 {
            for chi in SideMap::all(n) {
                for eps in ShadingMap::all(n, 2) {
                    let ops = random_ops(&fp, &chi, &eps, &mut rng);
                    let mu = mu_ops(&fp, &chi, &eps, &ops).unwrap();
                    let t = OperatorTuple::new_unchecked(fp.clone(), chi.clone(), mu.clone()).unwrap();
                    for d in enumerate_lr(&chi, &eps).unwrap().iter().filter(|d| d.stratum() == 0) {
                        let pi: BncPartition = lr0_to_partition(d).unwrap();
                        assert_eq!(e_d(&fp, d, &mu).unwrap(), FpVector::scalar(e_pi(&pi, &t).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn expansion_small() {
        let (fp, mut rng) = setup(3, 4);
        for n in 1..=3 {
            for chi in SideMap::all(n) {
                for eps in ShadingMap::all(n, 2) {
                    let ops = random_ops(&fp, &chi, &eps, &mut rng);
                    let r = expansion_check(&fp, &chi, &eps, &ops).unwrap();
                    assert!(r.equal, "{chi} {eps}");
                }
            }
        }
    }
}
