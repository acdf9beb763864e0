//! The reduced free product of B-B-bimodules with amalgamation over B,
//! truncated at a maximal tensor length, with the left and right
//! representations λ_k and ρ_k.
//!
//! Each X̊_k is a free right B-module with basis e^k_1, …, e^k_m, so the
//! balanced tensor products have the product basis and a vector is a finite
//! sum Σ_w e_w·c_w over alternating words w with coefficients c_w ∈ B.

mod commuting;
mod expansion;
mod haar;

pub use commuting::{
    commuting_faces_check, left_mult_m2, random_m2, regular_m2, right_mult_m2, CommutingFaces, CommutingFacesReport,
};
pub use expansion::{e_d, expansion_check, mu_ops, ExpansionReport};
pub use haar::{conjugated_families, conjugation_check, ConjugationReport, HaarModel};

use crate::base_algebra::{b_one, b_zero, AOperator, BElem, Bimodule, OperatorSpace, PairOfBFaces};
use crate::error::{Error, Result};
use crate::moment_cumulant::FamilyGens;
use crate::scalar::Q;
use std::collections::BTreeMap;
use std::sync::Arc;

/// (component, basis index) of one tensor factor.
pub type Letter = (usize, usize);
pub type Word = Vec<Letter>;

/// Σ_w e_w·c_w with no zero coefficients; the empty word is the B-part.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FpVector {
    terms: BTreeMap<Word, BElem>,
}

impl FpVector {
    pub fn zero() -> Self {
        FpVector::default()
    }

    /// b ⊕ 0.
    pub fn scalar(b: BElem) -> Self {
        let mut v = FpVector::zero();
        v.add_term(vec![], b);
        v
    }

    pub fn terms(&self) -> &BTreeMap<Word, BElem> {
        &self.terms
    }

    pub fn coefficient(&self, w: &[Letter]) -> Option<&BElem> {
        self.terms.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: BElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &FpVector) -> FpVector {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, x: &Q) -> FpVector {
        let mut out = FpVector::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.scale(x));
        }
        out
    }

    /// (1 − p)v.
    pub fn without_b_part(&self) -> FpVector {
        let mut out = self.clone();
        out.terms.remove(&Vec::new());
        out
    }

    pub fn max_length(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }
}

/// A component operator with the images of 1_B and each e_i·1_B, which
/// determine λ_k(T) for right-linear T.
#[derive(Debug)]
pub struct LiftedOp {
    op: AOperator,
    images: Vec<Result<(BElem, Vec<BElem>)>>,
}

impl LiftedOp {
    pub fn op(&self) -> &AOperator {
        &self.op
    }
}

/// An operator on the free product, kept as an expression over λ_k(T),
/// ρ_k(T), L_b and R_b.
#[derive(Clone, Debug)]
pub enum FpOp {
    Identity,
    Lambda(usize, Arc<LiftedOp>),
    Rho(usize, Arc<LiftedOp>),
    LeftMul(BElem),
    RightMul(BElem),
    /// Applied right to left.
    Product(Vec<FpOp>),
    Sum(Vec<FpOp>),
    Scaled(Q, Box<FpOp>),
}

#[derive(Clone, Debug)]
pub struct FreeProduct {
    components: Vec<Arc<Bimodule>>,
    depth: usize,
    d: usize,
    central: Vec<bool>,
}

impl FreeProduct {
    pub fn new(components: Vec<Arc<Bimodule>>, depth: usize) -> Result<Self> {
        let d = components
            .first()
            .map(|c| c.d())
            .ok_or_else(|| Error::Precondition("at least one component".into()))?;
        if components.iter().any(|c| c.d() != d) {
            return Err(Error::Dimension("components over different base algebras".into()));
        }
        let central = components
            .iter()
            .map(|c| {
                let units = crate::base_algebra::b_units(d);
                c.phi_units().iter().zip(&units).all(|(p, e)| *p == crate::base_algebra::QMatrix::identity(c.m()).kron(e))
            })
            .collect();
        Ok(FreeProduct { components, depth, d, central })
    }

    pub fn components(&self) -> &[Arc<Bimodule>] {
        &self.components
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Every alternating word of length at most the depth.
    pub fn basis_words(&self) -> Vec<Word> {
        let mut out = vec![vec![]];
        let mut frontier: Vec<Word> = vec![vec![]];
        for _ in 0..self.depth {
            let mut next = vec![];
            for w in &frontier {
                for (k, c) in self.components.iter().enumerate() {
                    if w.last().is_some_and(|l| l.0 == k) {
                        continue;
                    }
                    for i in 0..c.m() {
                        let mut w2 = w.clone();
                        w2.push((k, i));
                        next.push(w2);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Dimension over ℚ of the truncated space.
    pub fn dim(&self) -> usize {
        self.basis_words().len() * self.d * self.d
    }

    /// A vector of X_k viewed inside the free product.
    pub fn embed(&self, k: usize, v: &[Q]) -> Result<FpVector> {
        let comp = self.component(k)?;
        let (b, cs) = comp.decompose(v);
        let mut out = FpVector::scalar(b);
        for (i, c) in cs.into_iter().enumerate() {
            out.add_term(vec![(k, i)], c);
        }
        Ok(out)
    }

    fn component(&self, k: usize) -> Result<&Arc<Bimodule>> {
        self.components
            .get(k)
            .ok_or(Error::IndexOutOfRange { index: k, n: self.components.len() })
    }

    fn check_dim(&self, k: usize, t: &AOperator) -> Result<()> {
        let n = self.component(k)?.dim();
        if t.matrix().rows() != n || t.matrix().cols() != n {
            return Err(Error::Dimension(format!("operator is not on component {k}")));
        }
        Ok(())
    }

    /// λ_k(T) for T commuting with the right action of B on X_k.
    pub fn lambda(&self, k: usize, t: &AOperator) -> Result<FpOp> {
        self.check_dim(k, t)?;
        let comp = self.component(k)?;
        if !comp.is_left_operator(t) {
            return Err(Error::SideAdmissibility { position: k, side: "left" });
        }
        let one = b_one(self.d);
        let mut images = vec![t.apply(&comp.embed_b(&one)).map(|v| comp.decompose(&v))];
        for i in 0..comp.m() {
            images.push(t.apply(&comp.basis_vector(i, &one)).map(|v| comp.decompose(&v)));
        }
        Ok(FpOp::Lambda(k, Arc::new(LiftedOp { op: t.clone(), images })))
    }

    /// ρ_k(T) for T commuting with the left action of B on X_k.
    pub fn rho(&self, k: usize, t: &AOperator) -> Result<FpOp> {
        self.check_dim(k, t)?;
        if !self.component(k)?.is_right_operator(t) {
            return Err(Error::SideAdmissibility { position: k, side: "right" });
        }
        Ok(FpOp::Rho(k, Arc::new(LiftedOp { op: t.clone(), images: vec![] })))
    }

    /// Lifts a pair of faces living on component k.
    pub fn lift_pair(&self, k: usize, pair: &PairOfBFaces) -> Result<FamilyGens<FreeProduct>> {
        if **self.component(k)? != *pair.bimodule {
            return Err(Error::Precondition(format!("pair does not live on component {k}")));
        }
        let left = pair.left_gens.iter().map(|t| self.lambda(k, t)).collect::<Result<Vec<_>>>()?;
        let right = pair.right_gens.iter().map(|t| self.rho(k, t)).collect::<Result<Vec<_>>>()?;
        Ok(FamilyGens::new(left, right))
    }

    fn push(&self, out: &mut FpVector, w: Word, c: BElem) -> Result<()> {
        if w.len() > self.depth && !c.is_zero() {
            return Err(Error::Truncation(format!("tensor length {} exceeds depth {}", w.len(), self.depth)));
        }
        out.add_term(w, c);
        Ok(())
    }

    /// Adds prefix ⊗ b·(e_rest c) to `out`.
    fn lmul_into(&self, b: &BElem, rest: &[Letter], c: &BElem, prefix: &mut Word, out: &mut FpVector) -> Result<()> {
        if b.is_zero() {
            return Ok(());
        }
        let Some(&(k, i)) = rest.first() else {
            return self.push(out, prefix.clone(), b * c);
        };
        if self.central[k] {
            prefix.push((k, i));
            let r = self.lmul_into(b, &rest[1..], c, prefix, out);
            prefix.pop();
            return r;
        }
        let comp = &self.components[k];
        let phi = comp.phi(b);
        for j in 0..comp.m() {
            let a = phi.block(j, i, self.d);
            if !a.is_zero() {
                prefix.push((k, j));
                let r = self.lmul_into(&a, &rest[1..], c, prefix, out);
                prefix.pop();
                r?;
            }
        }
        Ok(())
    }

    fn lmul(&self, b: &BElem, v: &FpVector) -> Result<FpVector> {
        let mut out = FpVector::zero();
        for (w, c) in &v.terms {
            self.lmul_into(b, w, c, &mut vec![], &mut out)?;
        }
        Ok(out)
    }

    fn apply_lambda(&self, k: usize, t: &LiftedOp, v: &FpVector) -> Result<FpVector> {
        let mut out = FpVector::zero();
        for (w, c) in &v.terms {
            let (img, rest) = match w.first() {
                Some(&(k1, i1)) if k1 == k => (&t.images[1 + i1], &w[1..]),
                _ => (&t.images[0], &w[..]),
            };
            let (b0, a) = img.as_ref().map_err(Clone::clone)?;
            self.lmul_into(b0, rest, c, &mut vec![], &mut out)?;
            for (j, aj) in a.iter().enumerate() {
                self.lmul_into(aj, rest, c, &mut vec![(k, j)], &mut out)?;
            }
        }
        Ok(out)
    }

    fn apply_rho(&self, k: usize, t: &LiftedOp, v: &FpVector) -> Result<FpVector> {
        let comp = &self.components[k];
        let mut out = FpVector::zero();
        for (w, c) in &v.terms {
            let (head, y) = match w.last() {
                Some(&(kp, ip)) if kp == k => (&w[..w.len() - 1], comp.basis_vector(ip, c)),
                _ => (&w[..], comp.embed_b(c)),
            };
            let (b0, a) = comp.decompose(&t.op.apply(&y)?);
            self.push(&mut out, head.to_vec(), b0)?;
            for (j, aj) in a.into_iter().enumerate() {
                let mut w2 = head.to_vec();
                w2.push((k, j));
                self.push(&mut out, w2, aj)?;
            }
        }
        Ok(out)
    }
}

impl OperatorSpace for FreeProduct {
    type Op = FpOp;
    type Vector = FpVector;

    fn b_dim(&self) -> usize {
        self.d
    }

    fn vacuum(&self) -> FpVector {
        FpVector::scalar(b_one(self.d))
    }

    fn apply(&self, op: &FpOp, v: &FpVector) -> Result<FpVector> {
        match op {
            FpOp::Identity => Ok(v.clone()),
            FpOp::Lambda(k, t) => self.apply_lambda(*k, t, v),
            FpOp::Rho(k, t) => self.apply_rho(*k, t, v),
            FpOp::LeftMul(b) => self.lmul(b, v),
            FpOp::RightMul(b) => Ok(self.apply_right_mult(b, v)),
            FpOp::Product(ops) => ops.iter().rev().try_fold(v.clone(), |acc, o| self.apply(o, &acc)),
            FpOp::Sum(ops) => ops.iter().try_fold(FpVector::zero(), |acc, o| Ok(acc.add(&self.apply(o, v)?))),
            FpOp::Scaled(x, o) => Ok(self.apply(o, v)?.scale(x)),
        }
    }

    fn apply_left_mult(&self, b: &BElem, v: &FpVector) -> FpVector {
        // L_b never lengthens a word.
        self.lmul(b, v).expect("left multiplication preserves tensor length")
    }

    fn apply_right_mult(&self, b: &BElem, v: &FpVector) -> FpVector {
        let mut out = FpVector::zero();
        for (w, c) in &v.terms {
            out.add_term(w.clone(), c * b);
        }
        out
    }

    fn project(&self, v: &FpVector) -> BElem {
        v.coefficient(&[]).cloned().unwrap_or_else(|| b_zero(self.d))
    }

    fn compose(&self, a: &FpOp, b: &FpOp) -> FpOp {
        let mut ops = vec![];
        for x in [a, b] {
            match x {
                FpOp::Product(inner) => ops.extend(inner.iter().cloned()),
                FpOp::Identity => {}
                other => ops.push(other.clone()),
            }
        }
        match ops.len() {
            0 => FpOp::Identity,
            1 => ops.pop().unwrap(),
            _ => FpOp::Product(ops),
        }
    }

    fn add(&self, a: &FpOp, b: &FpOp) -> FpOp {
        FpOp::Sum(vec![a.clone(), b.clone()])
    }

    fn left_mult(&self, b: &BElem) -> FpOp {
        FpOp::LeftMul(b.clone())
    }

    fn right_mult(&self, b: &BElem) -> FpOp {
        FpOp::RightMul(b.clone())
    }
}
