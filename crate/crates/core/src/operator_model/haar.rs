//! The B-valued Haar bi-unitary on a finite window of ℓ²(ℤ, B).

use super::{FpOp, FreeProduct};
use crate::base_algebra::{AOperator, BElem, Bimodule, OperatorSpace, PairOfBFaces, QMatrix};
use crate::bnc_core::SideMap;
use crate::error::{Error, Result};
use crate::moment_cumulant::{bifree_sweep, FamilyGens, MixedEntry, SweepConfig, SweepReport};
use serde::Serialize;
use std::collections::BTreeSet;
use std::sync::Arc;

/// B·δ_{−m} ⊕ … ⊕ B·δ_m with specified part B·δ₀ and the shift
/// U(δ_j ⊗ b) = δ_{j+1} ⊗ b. Basis index i < m carries δ_{i−m}, and
/// i ≥ m carries δ_{i−m+1}.
#[derive(Clone, Debug)]
pub struct HaarModel {
    window: usize,
    bimodule: Arc<Bimodule>,
    u: AOperator,
    u_inv: AOperator,
}

impl HaarModel {
    pub fn new(d: usize, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(Error::Precondition("window must be positive".into()));
        }
        let bimodule = Arc::new(Bimodule::central(d, 2 * window));
        let m = window as i64;
        let u = Self::shift(d, window, 1, m);
        let u_inv = Self::shift(d, window, -1, -m);
        Ok(HaarModel { window, bimodule, u, u_inv })
    }

    /// Block of δ_j in the tall vector.
    fn block(window: usize, j: i64) -> usize {
        let m = window as i64;
        match j {
            0 => 0,
            j if j < 0 => (1 + j + m) as usize,
            j => (j + m) as usize,
        }
    }

    fn shift(d: usize, window: usize, step: i64, edge: i64) -> AOperator {
        let m = window as i64;
        let blocks = 1 + 2 * window;
        let mut p = QMatrix::zeros(blocks, blocks);
        for j in -m..=m {
            if j != edge {
                p.set(Self::block(window, j + step), Self::block(window, j), crate::scalar::q(1));
            }
        }
        let dd = d * d;
        let edge_block = Self::block(window, edge);
        let truncated: BTreeSet<usize> = (edge_block * dd..(edge_block + 1) * dd).collect();
        AOperator::with_truncated(p.kron(&QMatrix::identity(dd)), truncated)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn bimodule(&self) -> &Arc<Bimodule> {
        &self.bimodule
    }

    pub fn u(&self) -> &AOperator {
        &self.u
    }

    pub fn u_inv(&self) -> &AOperator {
        &self.u_inv
    }

    /// δ_j ⊗ b.
    pub fn delta(&self, j: i64, b: &BElem) -> Result<Vec<crate::scalar::Q>> {
        if j.unsigned_abs() as usize > self.window {
            return Err(Error::Truncation(format!("δ_{j} lies outside the window {}", self.window)));
        }
        match Self::block(self.window, j) {
            0 => Ok(self.bimodule.embed_b(b)),
            k => Ok(self.bimodule.basis_vector(k - 1, b)),
        }
    }

    /// E(U^{a₁}U^{a₂}⋯) with each aᵢ = ±1, applied right to left.
    pub fn word_expectation(&self, exps: &[i8]) -> Result<BElem> {
        if exps.len() > self.window {
            return Err(Error::Truncation(format!("word of length {} exceeds the window {}", exps.len(), self.window)));
        }
        let ops: Vec<&AOperator> = exps.iter().map(|&a| if a > 0 { &self.u } else { &self.u_inv }).collect();
        self.bimodule.expect_word(&ops)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ConjugationReport {
    pub words_checked: usize,
    /// Words where the conjugated pair's moment differs from the original.
    pub distribution_mismatches: Vec<MixedEntry>,
    pub bifree: SweepReport,
}

impl ConjugationReport {
    pub fn is_clean(&self) -> bool {
        self.distribution_mismatches.is_empty() && self.bifree.is_clean()
    }
}

/// Realizes (C, D) on component 0 and the Haar pair on component 1 of a free
/// product, and returns (original, conjugated) generators.
pub fn conjugated_families(
    pair: &PairOfBFaces,
    window: usize,
    depth: usize,
) -> Result<(Arc<FreeProduct>, FamilyGens<FreeProduct>, FamilyGens<FreeProduct>)> {
    let haar = HaarModel::new(pair.bimodule.d(), window)?;
    let fp = Arc::new(FreeProduct::new(vec![pair.bimodule.clone(), haar.bimodule.clone()], depth)?);
    let orig = fp.lift_pair(0, pair)?;
    let (ul, ul_inv) = (fp.lambda(1, haar.u())?, fp.lambda(1, haar.u_inv())?);
    let (ur, ur_inv) = (fp.rho(1, haar.u())?, fp.rho(1, haar.u_inv())?);
    let conj = |inv: &FpOp, t: &FpOp, u: &FpOp| fp.product(&[inv.clone(), t.clone(), u.clone()]);
    let conj_gens = FamilyGens::new(
        orig.left.iter().map(|t| conj(&ul_inv, t, &ul)).collect(),
        // Right faces compose in reverse under the anti-homomorphic reading, so U_r⁻¹DU_r is
        // ρ(U)ρ(D)ρ(U⁻¹) here.
        orig.right.iter().map(|t| conj(&ur, t, &ur_inv)).collect(),
    );
    Ok((fp, orig, conj_gens))
}

/// (a) every generator word has the same moment for the conjugated pair as
/// for the original; (b) the two pairs are bi-free up to the order bound.
pub fn conjugation_check(pair: &PairOfBFaces, window: usize, depth: usize, order: usize) -> Result<ConjugationReport> {
    let (fp, orig, conj) = conjugated_families(pair, window, depth)?;
    let mut report = ConjugationReport::default();
    for n in 1..=order {
        for chi in SideMap::all(n) {
            let sizes: Vec<usize> = (0..n).map(|k| orig.gens(chi.side(k)).len()).collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut word = vec![0usize; n];
            loop {
                let pick = |f: &FamilyGens<FreeProduct>| -> Vec<FpOp> {
                    (0..n).map(|k| f.gens(chi.side(k))[word[k]].clone()).collect()
                };
                let (a, b) = (pick(&orig), pick(&conj));
                let lhs = fp.expect_word(&a.iter().collect::<Vec<_>>())?;
                let rhs = fp.expect_word(&b.iter().collect::<Vec<_>>())?;
                report.words_checked += 1;
                if lhs != rhs {
                    report.distribution_mismatches.push(MixedEntry {
                        chi: chi.to_string(),
                        eps: "0".repeat(n),
                        word: word.clone(),
                        quantity: "joint distribution",
                        lhs,
                        rhs,
                    });
                }
                let mut i = n;
                while i > 0 {
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
    let cfg = SweepConfig { max_order: order, ..Default::default() };
    report.bifree = bifree_sweep(&fp, &[orig, conj], &cfg)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_algebra::{b_one, b_zero};
    use crate::bnc_core::Side;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shift_moments() {
        let h = HaarModel::new(2, 6).unwrap();
        assert!(h.bimodule().is_left_operator(h.u()) && h.bimodule().is_right_operator(h.u()));
        assert_eq!(h.word_expectation(&[]).unwrap(), b_one(2));
        for j in 1..=6 {
            assert_eq!(h.word_expectation(&vec![1; j]).unwrap(), b_zero(2));
            assert_eq!(h.word_expectation(&vec![-1; j]).unwrap(), b_zero(2));
        }
        assert_eq!(h.word_expectation(&[1, -1]).unwrap(), b_one(2));
        assert!(matches!(h.word_expectation(&[1; 7]), Err(Error::Truncation(_))));
        let b = QMatrix::from_i64(2, 2, &[1, 2, 3, 4]);
        assert_eq!(h.u().apply(&h.delta(2, &b).unwrap()).unwrap(), h.delta(3, &b).unwrap());
        assert!(h.u().apply(&h.delta(6, &b).unwrap()).is_err());
    }

    #[test]
    fn words_match_the_haar_rule() {
        // Brute force: multiply the matrices outright and compare with the
        // rule "moment is 1 exactly when the exponents sum to zero".
        let h = HaarModel::new(1, 6).unwrap();
        for len in 0..=6usize {
            for mask in 0..1u32 << len {
                let exps: Vec<i8> = (0..len).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
                let mut m = h.bimodule().identity();
                for &a in &exps {
                    m = m.compose(if a > 0 { h.u() } else { h.u_inv() });
                }
                let direct = h.bimodule().expectation(&m).unwrap();
                let sum: i64 = exps.iter().map(|&a| a as i64).sum();
                let rule = if sum == 0 { b_one(1) } else { b_zero(1) };
                assert_eq!(h.word_expectation(&exps).unwrap(), rule);
                assert_eq!(direct, rule);
            }
        }
    }

    #[test]
    fn order_one_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        let pair = PairOfBFaces::random(x, 2, 2, 2, &mut rng);
        let (fp, orig, conj) = conjugated_families(&pair, 2, 4).unwrap();
        for side in [Side::Left, Side::Right] {
            for (a, b) in orig.gens(side).iter().zip(conj.gens(side)) {
                assert_eq!(fp.expectation(a).unwrap(), fp.expectation(b).unwrap());
            }
        }
        let id = fp.lambda(0, &pair.bimodule.identity()).unwrap();
        let (ul, uli) = (fp.lambda(1, HaarModel::new(2, 2).unwrap().u()).unwrap(), fp.lambda(1, HaarModel::new(2, 2).unwrap().u_inv()).unwrap());
        let c = fp.product(&[uli, id, ul]);
        assert_eq!(fp.expectation(&c).unwrap(), b_one(2));
    }

    #[test]
    fn conjugation_order_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = Arc::new(Bimodule::random(2, 1, &mut rng));
        let pair = PairOfBFaces::random(x, 1, 1, 2, &mut rng);
        let r = conjugation_check(&pair, 4, 6, 2).unwrap();
        assert!(r.is_clean(), "{:?}", r.distribution_mismatches);
        assert!(r.words_checked > 0 && r.bifree.checked() > 0);
    }
}
