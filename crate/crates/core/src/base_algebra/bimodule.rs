//! Finite-dimensional B-B-bimodules X = B ⊕ X̊ with X̊ = ⊕ e_i·B a free right
//! B-module.
//!
//! A vector of X is stored as a tall (1+m)d × d matrix, flattened row-major:
//! the B-part first, then the coefficients c_i of e_i. The right action is
//! right multiplication of the tall matrix; the left action of b is left
//! multiplication by Φ(b) = diag(b, φ(b)), where b·e_i = Σ_j e_j φ(b)_{ji}.

use super::{b_units, BElem, OperatorSpace, QMatrix};
use crate::error::{Error, Result};
use crate::scalar::{q, Q};
use num_traits::Zero;
use rand::Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    d: usize,
    m: usize,
    /// φ(E_u) for each matrix unit, md × md.
    phi: Vec<QMatrix>,
    left: Vec<QMatrix>,
    right: Vec<QMatrix>,
    /// (P, P⁻¹) with P⁻¹Φ(b)P = I ⊗ b, when known.
    frame: Option<(QMatrix, QMatrix)>,
}

impl Bimodule {
    /// Bimodule from the left action on X̊, given on matrix units.
    pub fn from_phi(d: usize, m: usize, phi: Vec<QMatrix>) -> Result<Self> {
        if phi.len() != d * d {
            return Err(Error::Dimension(format!("expected {} action matrices, got {}", d * d, phi.len())));
        }
        if phi.iter().any(|p| p.rows() != m * d || p.cols() != m * d) {
            return Err(Error::Dimension(format!("action matrices must be {0}x{0}", m * d)));
        }
        let units = b_units(d);
        let mut sum = QMatrix::zeros(m * d, m * d);
        for i in 0..d {
            sum = &sum + &phi[i * d + i];
        }
        if sum != QMatrix::identity(m * d) {
            return Err(Error::Dimension("left action is not unital".into()));
        }
        for u in 0..d * d {
            for v in 0..d * d {
                let prod = &units[u] * &units[v];
                let expected = phi_of(&phi, &prod);
                if &phi[u] * &phi[v] != expected {
                    return Err(Error::Dimension("left action is not multiplicative".into()));
                }
            }
        }
        Ok(Self::assemble(d, m, phi, None))
    }

    /// φ(b) = S(I_m ⊗ b)S⁻¹.
    pub fn conjugated(d: usize, m: usize, s: &QMatrix) -> Result<Self> {
        let s_inv = s
            .inverse()
            .ok_or_else(|| Error::Dimension("conjugating matrix is singular".into()))?;
        if s.rows() != m * d {
            return Err(Error::Dimension(format!("conjugating matrix must be {0}x{0}", m * d)));
        }
        let phi = b_units(d)
            .iter()
            .map(|e| &(s * &QMatrix::identity(m).kron(e)) * &s_inv)
            .collect();
        let mut p = QMatrix::identity((1 + m) * d);
        let mut p_inv = QMatrix::identity((1 + m) * d);
        for i in 0..m * d {
            for j in 0..m * d {
                p.set(d + i, d + j, s.get(i, j).clone());
                p_inv.set(d + i, d + j, s_inv.get(i, j).clone());
            }
        }
        Ok(Self::assemble(d, m, phi, Some((p, p_inv))))
    }

    /// The bimodule where b·e_i = e_i·b.
    pub fn central(d: usize, m: usize) -> Self {
        Self::conjugated(d, m, &QMatrix::identity(m * d)).expect("identity frame")
    }

    /// A bimodule twisted by a random unimodular integer matrix, so all
    /// action matrices stay integral.
    pub fn random<R: Rng>(d: usize, m: usize, rng: &mut R) -> Self {
        let k = m * d;
        let mut s = QMatrix::identity(k);
        if k > 1 {
            for _ in 0..2 * k {
                let i = rng.random_range(0..k);
                let mut j = rng.random_range(0..k - 1);
                if j >= i {
                    j += 1;
                }
                let c = q(if rng.random_bool(0.5) { 1 } else { -1 });
                // row_i += c·row_j
                for col in 0..k {
                    let v = s.get(i, col) + &c * s.get(j, col);
                    s.set(i, col, v);
                }
            }
        }
        Self::conjugated(d, m, &s).expect("unimodular")
    }

    fn assemble(d: usize, m: usize, phi: Vec<QMatrix>, frame: Option<(QMatrix, QMatrix)>) -> Self {
        let units = b_units(d);
        let r = (1 + m) * d;
        let left = (0..d * d)
            .map(|u| {
                let mut big = QMatrix::zeros(r, r);
                big.set_block(0, 0, &units[u]);
                for i in 0..m * d {
                    for j in 0..m * d {
                        big.set(d + i, d + j, phi[u].get(i, j).clone());
                    }
                }
                big.kron(&QMatrix::identity(d))
            })
            .collect();
        let right = units.iter().map(|e| QMatrix::identity(r).kron(&e.transpose())).collect();
        Bimodule { d, m, phi, left, right, frame }
    }

    pub fn dim(&self) -> usize {
        self.d * self.d * (1 + self.m)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Rank of X̊ as a free right B-module.
    pub fn m(&self) -> usize {
        self.m
    }

    /// φ(b) as an md × md matrix.
    pub fn phi(&self, b: &BElem) -> QMatrix {
        phi_of(&self.phi, b)
    }

    pub fn phi_units(&self) -> &[QMatrix] {
        &self.phi
    }

    pub fn left_action_units(&self) -> &[QMatrix] {
        &self.left
    }

    pub fn right_action_units(&self) -> &[QMatrix] {
        &self.right
    }

    fn combine(&self, mats: &[QMatrix], b: &BElem) -> QMatrix {
        let n = self.dim();
        let mut out = QMatrix::zeros(n, n);
        for (u, x) in b.data().iter().enumerate() {
            if !x.is_zero() {
                out = &out + &mats[u].scale(x);
            }
        }
        out
    }

    fn check_b(&self, b: &BElem) -> Result<()> {
        if b.rows() != self.d || b.cols() != self.d {
            return Err(Error::Dimension(format!("expected a {0}x{0} element of B", self.d)));
        }
        Ok(())
    }

    pub fn make_lb(&self, b: &BElem) -> Result<AOperator> {
        self.check_b(b)?;
        Ok(AOperator::new(self.combine(&self.left, b)))
    }

    pub fn make_rb(&self, b: &BElem) -> Result<AOperator> {
        self.check_b(b)?;
        Ok(AOperator::new(self.combine(&self.right, b)))
    }

    pub fn identity(&self) -> AOperator {
        AOperator::new(QMatrix::identity(self.dim()))
    }

    /// b ⊕ 0.
    pub fn embed_b(&self, b: &BElem) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[..self.d * self.d].clone_from_slice(b.data());
        v
    }

    /// e_i·c.
    pub fn basis_vector(&self, i: usize, c: &BElem) -> Vec<Q> {
        let d2 = self.d * self.d;
        let mut v = vec![Q::zero(); self.dim()];
        v[d2 * (1 + i)..d2 * (2 + i)].clone_from_slice(c.data());
        v
    }

    /// (p(v), c_1, …, c_m) with v = p(v) ⊕ Σ e_i c_i.
    pub fn decompose(&self, v: &[Q]) -> (BElem, Vec<BElem>) {
        let d2 = self.d * self.d;
        let part = |k: usize| QMatrix::from_vec(self.d, self.d, v[k * d2..(k + 1) * d2].to_vec()).unwrap();
        (part(0), (1..=self.m).map(part).collect())
    }

    pub fn expectation(&self, t: &AOperator) -> Result<BElem> {
        OperatorSpace::expectation(self, t)
    }

    /// T commutes with every R_b.
    pub fn is_left_operator(&self, t: &AOperator) -> bool {
        self.right.iter().all(|r| &t.matrix * r == r * &t.matrix)
    }

    /// T commutes with every L_b.
    pub fn is_right_operator(&self, t: &AOperator) -> bool {
        self.left.iter().all(|l| &t.matrix * l == l * &t.matrix)
    }

    /// X ↦ A·X for a (1+m)d-square matrix A; every left operator has this
    /// form.
    pub fn left_operator_from(&self, a: &QMatrix) -> Result<AOperator> {
        let r = (1 + self.m) * self.d;
        if a.rows() != r || a.cols() != r {
            return Err(Error::Dimension(format!("expected a {r}x{r} matrix")));
        }
        Ok(AOperator::new(a.kron(&QMatrix::identity(self.d))))
    }

    /// In the frame Y = P⁻¹X, Y_i ↦ Σ_j Y_j·c_{ji} where c_{ji} is the (j,i)
    /// d×d block of `c`; every right operator has this form.
    pub fn right_operator_from(&self, c: &QMatrix) -> Result<AOperator> {
        let (p, p_inv) = self
            .frame
            .as_ref()
            .ok_or_else(|| Error::Precondition("bimodule has no known frame".into()))?;
        let (d, k) = (self.d, 1 + self.m);
        if c.rows() != k * d || c.cols() != k * d {
            return Err(Error::Dimension(format!("expected a {0}x{0} matrix", k * d)));
        }
        let d2 = d * d;
        let mut inner = QMatrix::zeros(k * d2, k * d2);
        for i in 0..k {
            for j in 0..k {
                let blk = QMatrix::identity(d).kron(&c.block(j, i, d).transpose());
                for a in 0..d2 {
                    for b in 0..d2 {
                        inner.set(i * d2 + a, j * d2 + b, blk.get(a, b).clone());
                    }
                }
            }
        }
        let id = QMatrix::identity(d);
        Ok(AOperator::new(&(&p.kron(&id) * &inner) * &p_inv.kron(&id)))
    }

    pub fn random_left_operator<R: Rng>(&self, range: i64, rng: &mut R) -> AOperator {
        let r = (1 + self.m) * self.d;
        let a = random_int_matrix(r, range, rng);
        self.left_operator_from(&a).unwrap()
    }

    pub fn random_right_operator<R: Rng>(&self, range: i64, rng: &mut R) -> AOperator {
        if self.frame.is_some() {
            let r = (1 + self.m) * self.d;
            return self.right_operator_from(&random_int_matrix(r, range, rng)).unwrap();
        }
        let basis = self.commutant_basis(false);
        let n = self.dim();
        let mut t = QMatrix::zeros(n, n);
        for bm in &basis {
            t = &t + &bm.scale(&q(rng.random_range(-range..=range)));
        }
        AOperator::new(t)
    }

    /// A basis of the commutant of the right action (`left = true`) or the
    /// left action, found by solving the commutation constraints.
    pub fn commutant_basis(&self, left: bool) -> Vec<QMatrix> {
        let n = self.dim();
        let acts = if left { &self.right } else { &self.left };
        // Unknown T flattened row-major; constraint (TM − MT)_{ij} = 0.
        let mut rows = vec![];
        for mat in acts {
            for i in 0..n {
                for j in 0..n {
                    let mut row = vec![Q::zero(); n * n];
                    for k in 0..n {
                        row[i * n + k] += mat.get(k, j);
                        row[k * n + j] -= mat.get(i, k);
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        let n_rows = rows.len();
        let sys = QMatrix::from_vec(n_rows, n * n, rows.into_iter().flatten().collect()).unwrap();
        sys.nullspace()
            .into_iter()
            .map(|v| QMatrix::from_vec(n, n, v).unwrap())
            .collect()
    }
}

fn phi_of(phi: &[QMatrix], b: &BElem) -> QMatrix {
    let k = phi[0].rows();
    let mut out = QMatrix::zeros(k, k);
    for (u, x) in b.data().iter().enumerate() {
        if !x.is_zero() {
            out = &out + &phi[u].scale(x);
        }
    }
    out
}

fn random_int_matrix<R: Rng>(n: usize, range: i64, rng: &mut R) -> QMatrix {
    let data = (0..n * n).map(|_| q(rng.random_range(-range..=range))).collect();
    QMatrix::from_vec(n, n, data).unwrap()
}

/// A linear operator on a bimodule. Columns listed in `truncated` are basis
/// vectors whose image leaves the finite window the matrix describes;
/// applying the operator to a vector that touches them is an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AOperator {
    matrix: QMatrix,
    truncated: BTreeSet<usize>,
}

impl AOperator {
    pub fn new(matrix: QMatrix) -> Self {
        AOperator { matrix, truncated: BTreeSet::new() }
    }

    pub fn with_truncated(matrix: QMatrix, truncated: BTreeSet<usize>) -> Self {
        AOperator { matrix, truncated }
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn truncated(&self) -> &BTreeSet<usize> {
        &self.truncated
    }

    pub fn apply(&self, v: &[Q]) -> Result<Vec<Q>> {
        if v.len() != self.matrix.cols() {
            return Err(Error::Dimension(format!(
                "vector of length {} for an operator on dimension {}",
                v.len(),
                self.matrix.cols()
            )));
        }
        if let Some(c) = self.truncated.iter().find(|&&c| !v[c].is_zero()) {
            return Err(Error::Truncation(format!("basis vector {c} leaves the window")));
        }
        Ok(self.matrix.mul_vec(v))
    }

    /// self ∘ other.
    pub fn compose(&self, other: &AOperator) -> AOperator {
        let mut truncated = other.truncated.clone();
        for c in 0..other.matrix.cols() {
            if self.truncated.iter().any(|&r| !other.matrix.get(r, c).is_zero()) {
                truncated.insert(c);
            }
        }
        AOperator { matrix: &self.matrix * &other.matrix, truncated }
    }

    pub fn add(&self, other: &AOperator) -> AOperator {
        AOperator {
            matrix: &self.matrix + &other.matrix,
            truncated: self.truncated.union(&other.truncated).cloned().collect(),
        }
    }

    pub fn scale(&self, x: &Q) -> AOperator {
        AOperator { matrix: self.matrix.scale(x), truncated: self.truncated.clone() }
    }
}

impl OperatorSpace for Bimodule {
    type Op = AOperator;
    type Vector = Vec<Q>;

    fn b_dim(&self) -> usize {
        self.d
    }

    fn vacuum(&self) -> Vec<Q> {
        self.embed_b(&QMatrix::identity(self.d))
    }

    fn apply(&self, op: &AOperator, v: &Vec<Q>) -> Result<Vec<Q>> {
        op.apply(v)
    }

    fn apply_left_mult(&self, b: &BElem, v: &Vec<Q>) -> Vec<Q> {
        self.combine(&self.left, b).mul_vec(v)
    }

    fn apply_right_mult(&self, b: &BElem, v: &Vec<Q>) -> Vec<Q> {
        self.combine(&self.right, b).mul_vec(v)
    }

    fn project(&self, v: &Vec<Q>) -> BElem {
        QMatrix::from_vec(self.d, self.d, v[..self.d * self.d].to_vec()).unwrap()
    }

    fn compose(&self, a: &AOperator, b: &AOperator) -> AOperator {
        a.compose(b)
    }

    fn add(&self, a: &AOperator, b: &AOperator) -> AOperator {
        a.add(b)
    }

    fn left_mult(&self, b: &BElem) -> AOperator {
        AOperator::new(self.combine(&self.left, b))
    }

    fn right_mult(&self, b: &BElem) -> AOperator {
        AOperator::new(self.combine(&self.right, b))
    }
}

/// A bimodule with left generators in L_ℓ(X) and right generators in L_r(X).
#[derive(Clone, Debug)]
pub struct PairOfBFaces {
    pub bimodule: Arc<Bimodule>,
    pub left_gens: Vec<AOperator>,
    pub right_gens: Vec<AOperator>,
}

impl PairOfBFaces {
    pub fn new(bimodule: Arc<Bimodule>, left_gens: Vec<AOperator>, right_gens: Vec<AOperator>) -> Result<Self> {
        for (i, t) in left_gens.iter().enumerate() {
            if !bimodule.is_left_operator(t) {
                return Err(Error::SideAdmissibility { position: i, side: "left" });
            }
        }
        for (i, t) in right_gens.iter().enumerate() {
            if !bimodule.is_right_operator(t) {
                return Err(Error::SideAdmissibility { position: i, side: "right" });
            }
        }
        Ok(PairOfBFaces { bimodule, left_gens, right_gens })
    }

    pub fn random<R: Rng>(bimodule: Arc<Bimodule>, n_left: usize, n_right: usize, range: i64, rng: &mut R) -> Self {
        let left_gens = (0..n_left).map(|_| bimodule.random_left_operator(range, rng)).collect();
        let right_gens = (0..n_right).map(|_| bimodule.random_right_operator(range, rng)).collect();
        PairOfBFaces { bimodule, left_gens, right_gens }
    }
}
