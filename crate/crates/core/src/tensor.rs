//! Dense `(0,3)` coefficient arrays over a `(2n+1)`-dimensional basis.

use std::ops::{Index, IndexMut};

use crate::matrix::{max_abs, Matrix};
use crate::scalar::Scalar;

/// `coeffs[(a, b, c)] = T(f_a, f_b, f_c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Tensor3<S> {
    pub fn zeros(dim: usize) -> Self {
        Tensor3 {
            dim,
            data: vec![S::zero(); dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(dim * dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    data.push(f(a, b, c));
                }
            }
        }
        Tensor3 { dim, data }
    }

    /// Row-major `[a][b][c]` flattening; `None` if the length is not a cube.
    pub fn from_flat(data: Vec<S>) -> Option<Self> {
        let dim = (data.len() as f64).cbrt().round() as usize;
        (dim * dim * dim == data.len()).then_some(Tensor3 { dim, data })
    }

    pub fn from_nested(rows: Vec<Vec<Vec<S>>>) -> Option<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim * dim);
        for plane in rows {
            if plane.len() != dim {
                return None;
            }
            for row in plane {
                if row.len() != dim {
                    return None;
                }
                data.extend(row);
            }
        }
        Some(Tensor3 { dim, data })
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<S>>> {
        let d = self.dim;
        (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| self.data[(a * d + b) * d..(a * d + b + 1) * d].to_vec())
                    .collect()
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<S> {
        self.data
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.clone() + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.clone() - b)
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, k: &S) -> Self {
        Tensor3 {
            dim: self.dim,
            data: self.data.iter().map(|a| a.clone() * k).collect(),
        }
    }

    pub fn max_abs(&self) -> S {
        max_abs(&self.data)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.dim == rhs.dim
            && self
                .data
                .iter()
                .zip(&rhs.data)
                .all(|(a, b)| (a.clone() - b).is_negligible(tol))
    }

    /// Slot-wise change of arguments: `T'(X, Y, Z) = T(M₀X, M₁Y, M₂Z)`, i.e.
    /// `T'[a][b][c] = Σ T[p][q][r] M₀[p][a] M₁[q][b] M₂[r][c]`. `None` is the
    /// identity.
    pub fn pull_back(&self, maps: [Option<&Matrix<S>>; 3]) -> Self {
        let mut out = self.clone();
        for (slot, m) in maps.iter().enumerate() {
            if let Some(m) = m {
                out = out.mode_product(slot, m);
            }
        }
        out
    }

    fn mode_product(&self, slot: usize, m: &Matrix<S>) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        let stride = [d * d, d, 1][slot];
        for (flat, v) in self.data.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let p = (flat / stride) % d;
            let base = flat - p * stride;
            for a in 0..d {
                let w = &m[(p, a)];
                if !w.is_zero() {
                    let idx = base + a * stride;
                    out.data[idx] = out.data[idx].clone() + &(v.clone() * w);
                }
            }
        }
        out
    }

    /// Argument permutation: `T'(x₀, x₁, x₂) = T(x_{p[0]}, x_{p[1]}, x_{p[2]})`.
    pub fn permute(&self, p: [usize; 3]) -> Self {
        Self::from_fn(self.dim, |a, b, c| {
            let args = [a, b, c];
            self[(args[p[0]], args[p[1]], args[p[2]])].clone()
        })
    }

    /// `M[a][b] = Σ_r T[a][b][r] v[r]`.
    pub fn contract_last(&self, v: &[S]) -> Matrix<S> {
        let d = self.dim;
        Matrix::from_fn(d, d, |a, b| {
            let mut acc = S::zero();
            for (r, vr) in v.iter().enumerate() {
                if !vr.is_zero() {
                    acc = acc + &(self[(a, b, r)].clone() * vr);
                }
            }
            acc
        })
    }

    /// `w[c] = Σ_{a,b} M[a][b] T[a][b][c]`.
    pub fn trace_first_two(&self, m: &Matrix<S>) -> Vec<S> {
        let d = self.dim;
        let mut out = vec![S::zero(); d];
        for a in 0..d {
            for b in 0..d {
                let w = &m[(a, b)];
                if w.is_zero() {
                    continue;
                }
                for (c, o) in out.iter_mut().enumerate() {
                    let t = &self[(a, b, c)];
                    if !t.is_zero() {
                        *o = o.clone() + &(w.clone() * t);
                    }
                }
            }
        }
        out
    }

    /// `Σ T[a][b][c] U[a][b][c]`.
    pub fn full_contraction(&self, rhs: &Self) -> S {
        crate::matrix::dot(&self.data, &rhs.data)
    }

    /// The slot-antisymmetric part in the last two arguments.
    pub fn antisymmetrize(&self) -> Self {
        let half = S::ratio(1, 2);
        self.sub(&self.permute([0, 2, 1])).scale(&half)
    }
}

impl<S> Index<(usize, usize, usize)> for Tensor3<S> {
    type Output = S;

    fn index(&self, (a, b, c): (usize, usize, usize)) -> &S {
        &self.data[(a * self.dim + b) * self.dim + c]
    }
}

impl<S> IndexMut<(usize, usize, usize)> for Tensor3<S> {
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut S {
        &mut self.data[(a * self.dim + b) * self.dim + c]
    }
}
