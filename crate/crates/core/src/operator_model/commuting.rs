//! Left and right multiplication on the regular bimodule M₂(B), realized on
//! one or two components of a free product.

use super::{FpOp, FpVector, FreeProduct};
use crate::base_algebra::{b_units, random_belem, AOperator, BElem, Bimodule, OperatorSpace, QMatrix};
use crate::error::{Error, Result};
use crate::moment_cumulant::{bifree_sweep, ChiFilter, FamilyGens, SweepConfig, SweepReport};
use rand::Rng;
use serde::Serialize;
use std::sync::Arc;

/// M₂(B) with basis I, E₁₂, E₂₁, E₂₂ over B and p(g) = g₁₁. The coordinates
/// of g are (g₁₁, g₁₂, g₂₁, g₂₂ − g₁₁), so the B-part is g₁₁.
pub fn regular_m2(d: usize) -> Bimodule {
    Bimodule::central(d, 3)
}

const BASIS: [[i64; 4]; 4] = [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];

fn coords(g: [i64; 4]) -> [i64; 4] {
    [g[0], g[1], g[2], g[3] - g[0]]
}

fn mul2(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Operator on the tall vector of M₂(B) with block (w, v) = Σ_u c_w(u,v)·f(a_u).
fn assemble(d: usize, a: &[BElem; 4], left: bool) -> AOperator {
    let mut big = QMatrix::zeros(4 * d * d, 4 * d * d);
    for v in 0..4 {
        for u in 0..4 {
            let prod = if left { mul2(BASIS[u], BASIS[v]) } else { mul2(BASIS[v], BASIS[u]) };
            let c = coords(prod);
            let f = if left {
                a[u].kron(&QMatrix::identity(d))
            } else {
                QMatrix::identity(d).kron(&a[u].transpose())
            };
            for (w, &cw) in c.iter().enumerate() {
                if cw != 0 {
                    let cur = big.block(w, v, d * d);
                    big.set_block(w, v, &(&cur + &f.scale(&crate::scalar::q(cw))));
                }
            }
        }
    }
    AOperator::new(big)
}

/// L_a for a = Σ_u u ⊗ a_u.
pub fn left_mult_m2(d: usize, a: &[BElem; 4]) -> AOperator {
    assemble(d, a, true)
}

/// R_a for a = Σ_u u ⊗ a_u.
pub fn right_mult_m2(d: usize, a: &[BElem; 4]) -> AOperator {
    assemble(d, a, false)
}

pub fn random_m2<R: Rng>(d: usize, range: i64, rng: &mut R) -> [BElem; 4] {
    std::array::from_fn(|_| random_belem(d, range, rng))
}

/// Families {(C_k, D_k)} on a common free product, each given by paired
/// generators: `right[j]ξ` must equal `left[j]ξ`.
pub struct CommutingFaces {
    pub space: Arc<FreeProduct>,
    pub families: Vec<FamilyGens<FreeProduct>>,
}

impl CommutingFaces {
    /// C_k = λ_k(L_{a_k}), D_k = ρ_k(R_{a_k}) on separate copies of M₂(B).
    pub fn free(d: usize, elems: &[[BElem; 4]], depth: usize) -> Result<Self> {
        let x = Arc::new(regular_m2(d));
        let fp = Arc::new(FreeProduct::new(vec![x; elems.len()], depth)?);
        let families = elems
            .iter()
            .enumerate()
            .map(|(k, a)| {
                Ok(FamilyGens::new(
                    vec![fp.lambda(k, &left_mult_m2(d, a))?],
                    vec![fp.rho(k, &right_mult_m2(d, a))?],
                ))
            })
            .collect::<Result<_>>()?;
        Ok(CommutingFaces { space: fp, families })
    }

    /// Every family on one copy of M₂(B).
    pub fn dependent(d: usize, elems: &[[BElem; 4]], depth: usize) -> Result<Self> {
        let fp = Arc::new(FreeProduct::new(vec![Arc::new(regular_m2(d))], depth)?);
        let families = elems
            .iter()
            .map(|a| {
                Ok(FamilyGens::new(
                    vec![fp.lambda(0, &left_mult_m2(d, a))?],
                    vec![fp.rho(0, &right_mult_m2(d, a))?],
                ))
            })
            .collect::<Result<_>>()?;
        Ok(CommutingFaces { space: fp, families })
    }

    /// (1) every left generator commutes with every right generator, checked
    /// on e_w·E_ij for all words short enough to stay inside the depth;
    /// (2) right[j]ξ = left[j]ξ within each family.
    pub fn check_hypotheses(&self) -> Result<()> {
        let fp = &self.space;
        let d = fp.b_dim();
        let words: Vec<_> = fp.basis_words().into_iter().filter(|w| w.len() + 2 <= fp.depth()).collect();
        let lefts: Vec<&FpOp> = self.families.iter().flat_map(|f| &f.left).collect();
        let rights: Vec<&FpOp> = self.families.iter().flat_map(|f| &f.right).collect();
        for (i, s) in lefts.iter().enumerate() {
            for (j, t) in rights.iter().enumerate() {
                for w in &words {
                    for e in b_units(d) {
                        let mut v = FpVector::zero();
                        v.add_term(w.clone(), e);
                        let st = fp.apply(s, &fp.apply(t, &v)?)?;
                        let ts = fp.apply(t, &fp.apply(s, &v)?)?;
                        if st != ts {
                            return Err(Error::Hypothesis(format!(
                                "(1) left generator {i} and right generator {j} do not commute"
                            )));
                        }
                    }
                }
            }
        }
        let xi = fp.vacuum();
        for (k, f) in self.families.iter().enumerate() {
            if f.right.len() > f.left.len() {
                return Err(Error::Hypothesis(format!("(2) family {k} has unpaired right generators")));
            }
            for (j, t) in f.right.iter().enumerate() {
                if fp.apply(t, &xi)? != fp.apply(&f.left[j], &xi)? {
                    return Err(Error::Hypothesis(format!(
                        "(2) in family {k}, right generator {j} and left generator {j} differ on the state vector"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutingFacesReport {
    /// Left generators only: freeness.
    pub freeness: SweepReport,
    pub bifreeness: SweepReport,
}

impl CommutingFacesReport {
    /// Freeness of the left faces holds exactly when bi-freeness does.
    pub fn equivalence_holds(&self) -> bool {
        self.freeness.is_clean() == self.bifreeness.is_clean()
    }
}

pub fn commuting_faces_check(c: &CommutingFaces, order: usize) -> Result<CommutingFacesReport> {
    c.check_hypotheses()?;
    let base = SweepConfig { max_order: order, ..Default::default() };
    let freeness = bifree_sweep(&c.space, &c.families, &SweepConfig { filter: ChiFilter::AllLeft, ..base.clone() })?;
    let bifreeness = bifree_sweep(&c.space, &c.families, &base)?;
    Ok(CommutingFacesReport { freeness, bifreeness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_algebra::b_one;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// a·g and g·a computed on 2×2 block matrices directly.
    fn to_block(d: usize, v: &[crate::scalar::Q]) -> [BElem; 4] {
        let x = regular_m2(d);
        let (g11, c) = x.decompose(v);
        [g11.clone(), c[0].clone(), c[1].clone(), &c[2] + &g11]
    }

    fn from_block(d: usize, g: &[BElem; 4]) -> Vec<crate::scalar::Q> {
        let x = regular_m2(d);
        let mut v = x.embed_b(&g[0]);
        for (i, c) in [g[1].clone(), g[2].clone(), &g[3] - &g[0]].iter().enumerate() {
            let e = x.basis_vector(i, c);
            v = v.iter().zip(&e).map(|(a, b)| a + b).collect();
        }
        v
    }

    fn block_mul(a: &[BElem; 4], b: &[BElem; 4]) -> [BElem; 4] {
        [
            &(&a[0] * &b[0]) + &(&a[1] * &b[2]),
            &(&a[0] * &b[1]) + &(&a[1] * &b[3]),
            &(&a[2] * &b[0]) + &(&a[3] * &b[2]),
            &(&a[2] * &b[1]) + &(&a[3] * &b[3]),
        ]
    }

    /// Σ_u u ⊗ a_u as a 2×2 block matrix.
    fn as_block(a: &[BElem; 4]) -> [BElem; 4] {
        [a[0].clone(), a[1].clone(), a[2].clone(), &a[0] + &a[3]]
    }

    #[test]
    fn multiplication_operators_match_block_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let d = 2;
        let x = regular_m2(d);
        for _ in 0..5 {
            let a = random_m2(d, 3, &mut rng);
            let g = random_m2(d, 3, &mut rng);
            let v = from_block(d, &g);
            assert_eq!(to_block(d, &v), g);
            let (l, r) = (left_mult_m2(d, &a), right_mult_m2(d, &a));
            assert_eq!(to_block(d, &l.apply(&v).unwrap()), block_mul(&as_block(&a), &g));
            assert_eq!(to_block(d, &r.apply(&v).unwrap()), block_mul(&g, &as_block(&a)));
            assert!(x.is_left_operator(&l) && x.is_right_operator(&r));
            assert_eq!(l.compose(&r), r.compose(&l));
        }
    }

    #[test]
    fn shipped_constructions_satisfy_the_hypotheses() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let elems = [random_m2(1, 2, &mut rng), random_m2(1, 2, &mut rng)];
        CommutingFaces::free(1, &elems, 4).unwrap().check_hypotheses().unwrap();
        CommutingFaces::dependent(1, &elems, 4).unwrap().check_hypotheses().unwrap();
    }

    #[test]
    fn violated_hypotheses_are_named() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let elems = [random_m2(1, 2, &mut rng), random_m2(1, 2, &mut rng)];
        let mut c = CommutingFaces::free(1, &elems, 3).unwrap();
        // A left operator that does not commute with right multiplication.
        let x = c.space.components()[0].clone();
        let bad = loop {
            let t = x.random_left_operator(2, &mut rng);
            if t.compose(&right_mult_m2(1, &elems[0])) != right_mult_m2(1, &elems[0]).compose(&t) {
                break t;
            }
        };
        c.families[0].left[0] = c.space.lambda(0, &bad).unwrap();
        let err = c.check_hypotheses().unwrap_err();
        assert!(matches!(&err, Error::Hypothesis(m) if m.starts_with("(1)")), "{err}");

        let mut c = CommutingFaces::free(1, &elems, 3).unwrap();
        let other = left_mult_m2(1, &[b_one(1), b_one(1), b_one(1), b_one(1)]);
        c.families[1].left[0] = c.space.lambda(1, &other).unwrap();
        let err = c.check_hypotheses().unwrap_err();
        assert!(matches!(&err, Error::Hypothesis(m) if m.starts_with("(2)")), "{err}");
    }

    #[test]
    fn free_and_dependent_reports_low_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let elems = [random_m2(1, 2, &mut rng), random_m2(1, 2, &mut rng)];
        let free = commuting_faces_check(&CommutingFaces::free(1, &elems, 3).unwrap(), 3).unwrap();
        assert!(free.freeness.is_clean() && free.bifreeness.is_clean());
        let dep = commuting_faces_check(&CommutingFaces::dependent(1, &elems, 3).unwrap(), 3).unwrap();
        assert!(!dep.freeness.is_clean() && !dep.bifreeness.is_clean());
        assert!(free.equivalence_holds() && dep.equivalence_holds());
    }
}
