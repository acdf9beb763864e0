//! The base algebra B = M_d(ℚ), B-B-bimodules with a specified B-vector
//! state, and operators on them.

mod bimodule;
mod qmatrix;

pub use bimodule::{AOperator, Bimodule, PairOfBFaces};
pub use qmatrix::QMatrix;

use crate::error::Result;
use crate::scalar::q;
use rand::Rng;

/// An element of B = M_d(ℚ).
pub type BElem = QMatrix;

pub fn b_one(d: usize) -> BElem {
    QMatrix::identity(d)
}

pub fn b_zero(d: usize) -> BElem {
    QMatrix::zeros(d, d)
}

/// The matrix units E_{ij} in row-major order; index u = i·d + j.
pub fn b_units(d: usize) -> Vec<BElem> {
    (0..d * d).map(|u| QMatrix::unit(d, u / d, u % d)).collect()
}

/// A B-element with integer entries drawn from `-range..=range`.
pub fn random_belem<R: Rng>(d: usize, range: i64, rng: &mut R) -> BElem {
    let data = (0..d * d).map(|_| q(rng.random_range(-range..=range))).collect();
    QMatrix::from_vec(d, d, data).expect("square")
}

/// A space of operators with a distinguished state vector ξ = 1_B ⊕ 0 and
/// projection onto B. Implemented by single bimodules and by reduced free
/// products.
pub trait OperatorSpace {
    type Op: Clone;
    type Vector: Clone;

    fn b_dim(&self) -> usize;
    fn vacuum(&self) -> Self::Vector;
    fn apply(&self, op: &Self::Op, v: &Self::Vector) -> Result<Self::Vector>;
    fn apply_left_mult(&self, b: &BElem, v: &Self::Vector) -> Self::Vector;
    fn apply_right_mult(&self, b: &BElem, v: &Self::Vector) -> Self::Vector;
    fn project(&self, v: &Self::Vector) -> BElem;
    /// a∘b.
    fn compose(&self, a: &Self::Op, b: &Self::Op) -> Self::Op;
    fn add(&self, a: &Self::Op, b: &Self::Op) -> Self::Op;
    fn left_mult(&self, b: &BElem) -> Self::Op;
    fn right_mult(&self, b: &BElem) -> Self::Op;

    /// E(T) = p(T ξ).
    fn expectation(&self, op: &Self::Op) -> Result<BElem> {
        Ok(self.project(&self.apply(op, &self.vacuum())?))
    }

    /// T₁T₂⋯T_n, applied right to left.
    fn product(&self, ops: &[Self::Op]) -> Self::Op {
        let mut it = ops.iter().rev();
        let last = it.next().expect("non-empty product").clone();
        it.fold(last, |acc, t| self.compose(t, &acc))
    }

    /// E(T₁⋯T_n) without forming the product.
    fn expect_word(&self, ops: &[&Self::Op]) -> Result<BElem> {
        let mut v = self.vacuum();
        for t in ops.iter().rev() {
            v = self.apply(t, &v)?;
        }
        Ok(self.project(&v))
    }
}
