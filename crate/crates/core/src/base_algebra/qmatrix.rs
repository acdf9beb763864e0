//! Small dense matrices over ℚ.

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, q, Q};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    /// The matrix unit E_{ij}.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = Q::one();
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Q>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        QMatrix { rows, cols, data: data.iter().map(|&x| q(x)).collect() }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn scalar(n: usize, x: Q) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Q] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn scale(&self, x: &Q) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * x).collect() }
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Q::zero(); self.rows];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self.data[i * self.cols + j];
                if !a.is_zero() {
                    *o += a * vj;
                }
            }
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, other: &QMatrix) -> QMatrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            m.data[(i * other.rows + k) * c + j * other.cols + l] = a * b;
                        }
                    }
                }
            }
        }
        m
    }

    /// The `size`×`size` block at block position (bi, bj).
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> QMatrix {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                m.data[i * size + j] = self.get(bi * size + i, bj * size + j).clone();
            }
        }
        m
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, b: &QMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(bi * b.rows + i, bj * b.cols + j, b.get(i, j).clone());
            }
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).recip();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let s = self.get(r, j);
                    if !s.is_zero() {
                        let v = self.get(i, j) - &f * s;
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Q::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// A basis of {v : Av = 0}.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut r = self.clone();
        let pivots = r.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k * o.cols + j];
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_q).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a = QMatrix::from_i64(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 4]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, QMatrix::identity(3));
        assert!(QMatrix::from_i64(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn nullspace_is_a_kernel_basis() {
        let a = QMatrix::from_i64(2, 4, &[1, 2, 0, 1, 2, 4, 1, 0]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 4 - a.rank());
        for v in &ns {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn kron_mixed_product() {
        let a = QMatrix::from_i64(2, 2, &[1, 2, 3, 4]);
        let b = QMatrix::from_i64(2, 2, &[0, 1, -1, 2]);
        let c = QMatrix::from_i64(2, 2, &[2, 0, 1, 1]);
        let d = QMatrix::from_i64(2, 2, &[1, 1, 0, 3]);
        assert_eq!(&a.kron(&b) * &c.kron(&d), (&a * &c).kron(&(&b * &d)));
    }
}
