//! Small dense matrices with exact (or tolerance-aware) elimination.
//!
//! Matrices act on column vectors: `(M x)[row] = sum_col M[row][col] * x[col]`,
//! so column `j` of a matrix is the image of basis vector `j`.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn diagonal(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    what: "matrix row",
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != r {
                return Err(Error::DimensionMismatch {
                    what: "matrix column",
                    expected: r,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + &(a.clone() * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(self.cols, x.len(), "matrix-vector shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Row vector times matrix: `(c M)[j] = sum_i c[i] M[i][j]`.
    pub fn left_mul_vec(&self, c: &[S]) -> Vec<S> {
        assert_eq!(self.rows, c.len(), "covector-matrix shape mismatch");
        (0..self.cols)
            .map(|j| {
                let mut acc = S::zero();
                for (i, ci) in c.iter().enumerate() {
                    let m = &self[(i, j)];
                    if !ci.is_zero() && !m.is_zero() {
                        acc = acc + &(ci.clone() * m);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Matrix<S>) -> Matrix<S> {
        self.zip_with(rhs, |a, b| a.clone() + b)
    }

    pub fn sub(&self, rhs: &Matrix<S>) -> Matrix<S> {
        self.zip_with(rhs, |a, b| a.clone() - b)
    }

    fn zip_with(&self, rhs: &Matrix<S>, f: impl Fn(&S, &S) -> S) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, k: &S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * k).collect(),
        }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn max_abs(&self) -> S {
        max_abs(&self.data)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    pub fn approx_eq(&self, rhs: &Matrix<S>, tol: f64) -> bool {
        self.rows == rhs.rows
            && self.cols == rhs.cols
            && self
                .data
                .iter()
                .zip(&rhs.data)
                .all(|(a, b)| (a.clone() - b).is_negligible(tol))
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self, tol: f64) -> Result<Matrix<S>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                what: "inverse of non-square matrix",
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = select_pivot(&a, col, col, tol).ok_or(Error::Singular)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / &p;
                inv[(col, j)] = inv[(col, j)].clone() / &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    if !a[(col, j)].is_zero() {
                        a[(r, j)] = a[(r, j)].clone() - &(f.clone() * &a[(col, j)]);
                    }
                    if !inv[(col, j)].is_zero() {
                        inv[(r, j)] = inv[(r, j)].clone() - &(f.clone() * &inv[(col, j)]);
                    }
                }
            }
        }
        Ok(inv)
    }

    pub fn determinant(&self, tol: f64) -> S {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(pivot) = select_pivot(&a, col, col, tol) else {
                return S::zero();
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * &p;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone() / &p;
                for j in col..n {
                    a[(r, j)] = a[(r, j)].clone() - &(f.clone() * &a[(col, j)]);
                }
            }
        }
        det
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, tol: f64) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = select_pivot(self, row, col, tol) else {
                continue;
            };
            self.swap_rows(row, p);
            let pv = self[(row, col)].clone();
            for j in col..self.cols {
                self[(row, j)] = self[(row, j)].clone() / &pv;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for j in col..self.cols {
                    if !self[(row, j)].is_zero() {
                        self[(r, j)] = self[(r, j)].clone() - &(f.clone() * &self[(row, j)]);
                    }
                }
                if !S::EXACT {
                    self[(r, col)] = S::zero();
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.clone().rref(tol).len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        let mut r = self.clone();
        let pivots = r.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![S::zero(); self.cols];
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Exact mode takes the first nonzero entry; float mode the largest one.
fn select_pivot<S: Scalar>(m: &Matrix<S>, start: usize, col: usize, tol: f64) -> Option<usize> {
    if S::EXACT {
        (start..m.rows).find(|&r| !m[(r, col)].is_zero())
    } else {
        let best = (start..m.rows).max_by(|&a, &b| {
            m[(a, col)]
                .abs()
                .partial_cmp(&m[(b, col)].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        (!m[(best, col)].is_negligible(tol)).then_some(best)
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + &(x.clone() * y);
        }
    }
    acc
}

pub fn max_abs<S: Scalar>(xs: &[S]) -> S {
    xs.iter().fold(S::zero(), |m, x| {
        let a = x.abs();
        if a > m {
            a
        } else {
            m
        }
    })
}

pub fn unit<S: Scalar>(dim: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); dim];
    v[i] = S::one();
    v
}

pub fn axpy<S: Scalar>(k: &S, x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| k.clone() * a + b).collect()
}

pub fn scale_vec<S: Scalar>(k: &S, x: &[S]) -> Vec<S> {
    x.iter().map(|a| k.clone() * a).collect()
}

pub fn sub_vec<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    x.iter().zip(y).map(|(a, b)| a.clone() - b).collect()
}

pub fn rank_of_vectors<S: Scalar>(vectors: &[Vec<S>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    match Matrix::from_rows(vectors.to_vec()) {
        Ok(m) => m.rank(tol),
        Err(_) => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_roundtrip_exact() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(3));
        assert_eq!(a.determinant(0.0), q(18, 1));
    }

    #[test]
    fn singular_inverse_fails() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert!(matches!(a.inverse(0.0), Err(Error::Singular)));
        assert_eq!(a.determinant(0.0), q(0, 1));
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(0.0), 2);
        let ns = a.nullspace(0.0);
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(|x| x == &q(0, 1)));
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-13]]).unwrap();
        assert_eq!(a.rank(1e-9), 1);
        assert_eq!(a.rank(0.0), 2);
    }
}
