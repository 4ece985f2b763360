//! Pointwise almost paracontact metric structures `(φ, ξ, η, g)`.
//!
//! The standard basis order is `(e_1..e_n, φe_1..φe_n, ξ)`, in which
//! `g = diag(+1 (n times), -1 (n times), +1)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, scale_vec, unit, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    StandardPhiBasis,
    General,
}

#[derive(Clone, Debug)]
pub struct StructureSpace<S> {
    n: usize,
    g: Matrix<S>,
    g_inv: Matrix<S>,
    phi: Matrix<S>,
    xi: Vec<S>,
    eta: Vec<S>,
    basis_kind: BasisKind,
    tol: f64,
}

impl<S: Scalar> PartialEq for StructureSpace<S> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.g == other.g && self.phi == other.phi && self.xi == other.xi && self.eta == other.eta
    }
}

/// One violated structure invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PhiXi,
    EtaPhi,
    EtaXi,
    PhiSquared,
    MetricSymmetry,
    Compatibility,
    EtaMetricDual,
    Signature { positive: usize, negative: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PhiXi => f.write_str("φξ=0 violated"),
            Violation::EtaPhi => f.write_str("η∘φ=0 violated"),
            Violation::EtaXi => f.write_str("η(ξ)=1 violated"),
            Violation::PhiSquared => f.write_str("φ²=id−η⊗ξ violated"),
            Violation::MetricSymmetry => f.write_str("g symmetric violated"),
            Violation::Compatibility => f.write_str("g(φX,φY)=−g(X,Y)+η(X)η(Y) violated"),
            Violation::EtaMetricDual => f.write_str("η(X)=g(X,ξ) violated"),
            Violation::Signature { positive, negative } => {
                write!(f, "signature (n+1,n) violated: found ({positive},{negative})")
            }
        }
    }
}

/// Canonical structure in the standard φ-basis.
pub fn standard_structure<S: Scalar>(n: usize) -> Result<StructureSpace<S>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let dim = 2 * n + 1;
    let mut diag = vec![S::one(); dim];
    for d in diag.iter_mut().skip(n).take(n) {
        *d = -S::one();
    }
    let g = Matrix::diagonal(&diag);
    let mut phi = Matrix::zeros(dim, dim);
    for i in 0..n {
        phi[(n + i, i)] = S::one();
        phi[(i, n + i)] = S::one();
    }
    let xi = unit(dim, 2 * n);
    let eta = unit(dim, 2 * n);
    Ok(StructureSpace {
        n,
        g_inv: g.clone(),
        g,
        phi,
        xi,
        eta,
        basis_kind: BasisKind::StandardPhiBasis,
        tol: S::default_tolerance(),
    })
}

impl<S: Scalar> StructureSpace<S> {
    /// Assembles a structure from raw components without checking the
    /// paracontact invariants (see [`validate_structure`]). Shapes must agree
    /// and `g` must be invertible.
    pub fn from_parts(n: usize, g: Matrix<S>, phi: Matrix<S>, xi: Vec<S>, eta: Vec<S>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let dim = 2 * n + 1;
        for (what, found) in [
            ("metric rows", g.rows()),
            ("metric columns", g.cols()),
            ("phi rows", phi.rows()),
            ("phi columns", phi.cols()),
            ("xi", xi.len()),
            ("eta", eta.len()),
        ] {
            if found != dim {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: dim,
                    found,
                });
            }
        }
        let tol = S::default_tolerance();
        let g_inv = g
            .inverse(tol)
            .map_err(|_| Error::InvalidStructure("metric is degenerate".into()))?;
        let mut s = StructureSpace {
            n,
            g,
            g_inv,
            phi,
            xi,
            eta,
            basis_kind: BasisKind::General,
            tol,
        };
        s.refresh_kind();
        Ok(s)
    }

    /// Like [`StructureSpace::from_parts`] with `η = g(·, ξ)`.
    pub fn from_metric(n: usize, g: Matrix<S>, phi: Matrix<S>, xi: Vec<S>) -> Result<Self> {
        if xi.len() != g.cols() {
            return Err(Error::DimensionMismatch {
                what: "xi",
                expected: g.cols(),
                found: xi.len(),
            });
        }
        let eta = g.mul_vec(&xi);
        Self::from_parts(n, g, phi, xi, eta)
    }

    /// Validated constructor.
    pub fn new(n: usize, g: Matrix<S>, phi: Matrix<S>, xi: Vec<S>, eta: Vec<S>) -> Result<Self> {
        let s = Self::from_parts(n, g, phi, xi, eta)?;
        let report = validate_structure(&s);
        if report.is_empty() {
            Ok(s)
        } else {
            let msgs: Vec<String> = report.iter().map(ToString::to_string).collect();
            Err(Error::InvalidStructure(msgs.join("; ")))
        }
    }

    /// Replaces the zero-test tolerance (meaningful in float mode only).
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.refresh_kind();
        self
    }

    fn refresh_kind(&mut self) {
        self.basis_kind = match standard_structure::<S>(self.n) {
            Ok(std)
                if self.g.approx_eq(&std.g, self.tol)
                    && self.phi.approx_eq(&std.phi, self.tol)
                    && vec_close(&self.xi, &std.xi, self.tol)
                    && vec_close(&self.eta, &std.eta, self.tol) =>
            {
                BasisKind::StandardPhiBasis
            }
            _ => BasisKind::General,
        };
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn g(&self) -> &Matrix<S> {
        &self.g
    }

    pub fn g_inv(&self) -> &Matrix<S> {
        &self.g_inv
    }

    pub fn phi(&self) -> &Matrix<S> {
        &self.phi
    }

    pub fn xi(&self) -> &[S] {
        &self.xi
    }

    pub fn eta(&self) -> &[S] {
        &self.eta
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis_kind
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_standard(&self) -> bool {
        self.basis_kind == BasisKind::StandardPhiBasis
    }

    pub fn metric(&self, x: &[S], y: &[S]) -> S {
        dot(x, &self.g.mul_vec(y))
    }

    pub fn eta_of(&self, x: &[S]) -> S {
        dot(&self.eta, x)
    }

    pub fn phi_of(&self, x: &[S]) -> Vec<S> {
        self.phi.mul_vec(x)
    }

    /// Matrix of `h = φ² = id − η⊗ξ`.
    pub fn h(&self) -> Matrix<S> {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| {
            let id = if i == j { S::one() } else { S::zero() };
            id - &(self.xi[i].clone() * &self.eta[j])
        })
    }

    /// Vector dual to a covector: the `v` with `g(v, ·) = c`.
    pub fn raise(&self, c: &[S]) -> Vec<S> {
        self.g_inv.mul_vec(c)
    }

    /// g-adjoint `M* = g⁻¹ Mᵀ g`, so that `g(Mx, y) = g(x, M* y)`.
    pub fn adjoint(&self, m: &Matrix<S>) -> Matrix<S> {
        self.g_inv.mul(&m.transpose()).mul(&self.g)
    }

    /// Re-expresses the structure in the basis whose vectors are the columns
    /// of `c`.
    pub fn transport(&self, c: &Matrix<S>) -> Result<StructureSpace<S>> {
        if c.rows() != self.dim() || c.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                what: "change of basis",
                expected: self.dim(),
                found: c.rows(),
            });
        }
        let c_inv = c.inverse(self.tol)?;
        let g = c.transpose().mul(&self.g).mul(c);
        let phi = c_inv.mul(&self.phi).mul(c);
        let xi = c_inv.mul_vec(&self.xi);
        let eta = c.left_mul_vec(&self.eta);
        Ok(StructureSpace::from_parts(self.n, g, phi, xi, eta)?.with_tolerance(self.tol))
    }

    pub(crate) fn same_as(&self, other: &StructureSpace<S>) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

fn vec_close<S: Scalar>(a: &[S], b: &[S], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x.clone() - y).is_negligible(tol))
}

/// Lists every violated invariant; empty iff the structure is valid.
pub fn validate_structure<S: Scalar>(s: &StructureSpace<S>) -> Vec<Violation> {
    let tol = s.tol;
    let d = s.dim();
    let mut out = Vec::new();

    if !s.phi.mul_vec(&s.xi).iter().all(|x| x.is_negligible(tol)) {
        out.push(Violation::PhiXi);
    }
    if !s.phi.left_mul_vec(&s.eta).iter().all(|x| x.is_negligible(tol)) {
        out.push(Violation::EtaPhi);
    }
    if !(s.eta_of(&s.xi) - &S::one()).is_negligible(tol) {
        out.push(Violation::EtaXi);
    }
    if !s.phi.mul(&s.phi).approx_eq(&s.h(), tol) {
        out.push(Violation::PhiSquared);
    }
    if !s.g.approx_eq(&s.g.transpose(), tol) {
        out.push(Violation::MetricSymmetry);
    }
    let lhs = s.phi.transpose().mul(&s.g).mul(&s.phi);
    let rhs = Matrix::from_fn(d, d, |i, j| s.eta[i].clone() * &s.eta[j] - &s.g[(i, j)]);
    if !lhs.approx_eq(&rhs, tol) {
        out.push(Violation::Compatibility);
    }
    if !vec_close(&s.g.mul_vec(&s.xi), &s.eta, tol) {
        out.push(Violation::EtaMetricDual);
    }
    let (positive, negative, _) = inertia(&s.g, tol);
    if positive != s.n + 1 || negative != s.n {
        out.push(Violation::Signature { positive, negative });
    }
    out
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix by congruence
/// diagonalisation.
pub fn inertia<S: Scalar>(g: &Matrix<S>, tol: f64) -> (usize, usize, usize) {
    let d = g.rows();
    let mut a = g.add(&g.transpose()).scale(&S::ratio(1, 2));
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..d).collect();
    while !active.is_empty() {
        let diag_pivot = active.iter().position(|&i| !a[(i, i)].is_negligible(tol));
        let k = match diag_pivot {
            Some(k) => k,
            None => {
                // all diagonal entries vanish: fold a nonzero off-diagonal
                // entry onto the diagonal by a congruence
                let mut found = None;
                'outer: for (x, &i) in active.iter().enumerate() {
                    for &j in active.iter().skip(x + 1) {
                        if !a[(i, j)].is_negligible(tol) {
                            found = Some((x, i, j));
                            break 'outer;
                        }
                    }
                }
                let Some((x, i, j)) = found else { break };
                for r in 0..d {
                    a[(r, i)] = a[(r, i)].clone() + &a[(r, j)];
                }
                for c in 0..d {
                    a[(i, c)] = a[(i, c)].clone() + &a[(j, c)];
                }
                x
            }
        };
        let p = active.remove(k);
        let pv = a[(p, p)].clone();
        if pv > S::zero() {
            pos += 1;
        } else {
            neg += 1;
        }
        for &r in &active {
            if a[(r, p)].is_zero() {
                continue;
            }
            let f = a[(r, p)].clone() / &pv;
            for &c in &active {
                a[(r, c)] = a[(r, c)].clone() - &(f.clone() * &a[(p, c)]);
            }
        }
    }
    (pos, neg, d - pos - neg)
}

/// `hX = X − η(X)ξ`.
pub fn horizontal<S: Scalar>(s: &StructureSpace<S>, x: &[S]) -> Result<Vec<S>> {
    if x.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            what: "vector",
            expected: s.dim(),
            found: x.len(),
        });
    }
    let e = s.eta_of(x);
    Ok(axpy(&-e, &s.xi, x))
}

/// Change-of-basis matrix whose columns `(X_1..X_n, φX_1..φX_n, ξ)` form a
/// φ-basis, so that `s.transport(&C)` is the standard structure.
///
/// Candidates are the basis vectors in order, projected onto the horizontal
/// complement of the vectors already chosen. The first candidate of positive
/// norm `q` becomes the next `X_i`, scaled by `1/√q` when the root is
/// available. In exact mode with `q` not a rational square, the unit vector
/// is taken inside the hyperbolic plane `span(u, φu)` instead:
/// `X = αu + βφu` with `α − β = 1`, `α + β = 1/q`.
pub fn build_phi_basis<S: Scalar>(s: &StructureSpace<S>) -> Result<Matrix<S>> {
    let report = validate_structure(s);
    if !report.is_empty() {
        let msgs: Vec<String> = report.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidStructure(msgs.join("; ")));
    }
    let n = s.n;
    let d = s.dim();
    let tol = s.tol;
    let h = s.h();
    let mut xs: Vec<Vec<S>> = Vec::with_capacity(n);
    let mut phixs: Vec<Vec<S>> = Vec::with_capacity(n);

    for step in 0..n {
        let candidates: Vec<Vec<S>> = (0..d)
            .map(|j| {
                let w = h.column(j);
                let mut u = w.clone();
                for (x, px) in xs.iter().zip(&phixs) {
                    u = axpy(&-s.metric(&w, x), x, &u);
                    u = axpy(&s.metric(&w, px), px, &u);
                }
                u
            })
            .collect();
        let positive = |v: &Vec<S>| {
            let q = s.metric(v, v);
            !q.is_negligible(tol) && q > S::zero()
        };
        let negative = |v: &Vec<S>| {
            let q = s.metric(v, v);
            !q.is_negligible(tol) && q < S::zero()
        };
        let pick = candidates
            .iter()
            .find(|u| positive(u))
            .cloned()
            .or_else(|| candidates.iter().find(|u| negative(u)).map(|u| s.phi_of(u)))
            .or_else(|| {
                for a in 0..d {
                    for b in a + 1..d {
                        for sign in [S::one(), -S::one()] {
                            let w = axpy(&sign, &candidates[b], &candidates[a]);
                            if positive(&w) {
                                return Some(w);
                            }
                            if negative(&w) {
                                return Some(s.phi_of(&w));
                            }
                        }
                    }
                }
                None
            })
            .ok_or_else(|| Error::Degenerate(format!("no non-null horizontal vector at step {}", step + 1)))?;

        let q = s.metric(&pick, &pick);
        let x = match q.sqrt_exact() {
            Some(root) => scale_vec(&(S::one() / root), &pick),
            None => {
                let inv = S::one() / q;
                let two = S::from_i64(2);
                let alpha = (S::one() + &inv) / &two;
                let beta = (inv - &S::one()) / two;
                axpy(&alpha, &pick, &scale_vec(&beta, &s.phi_of(&pick)))
            }
        };
        phixs.push(s.phi_of(&x));
        xs.push(x);
    }

    let mut cols = xs;
    cols.extend(phixs);
    cols.push(s.xi.clone());
    Matrix::from_columns(&cols)
}

/// Element of the structure group: preserves `g`, commutes with `φ`, fixes `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<S> {
    a: Matrix<S>,
    a_inv: Matrix<S>,
}

impl<S: Scalar> GroupElement<S> {
    /// Checks the three group invariants against `s`.
    pub fn new(s: &StructureSpace<S>, a: Matrix<S>) -> Result<Self> {
        let d = s.dim();
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch {
                what: "group element",
                expected: d,
                found: a.rows(),
            });
        }
        let tol = s.tol;
        if !a.transpose().mul(&s.g).mul(&a).approx_eq(&s.g, tol) {
            return Err(Error::NotGroupElement("does not preserve g".into()));
        }
        if !a.mul(&s.phi).approx_eq(&s.phi.mul(&a), tol) {
            return Err(Error::NotGroupElement("does not commute with φ".into()));
        }
        if !vec_close(&a.mul_vec(&s.xi), &s.xi, tol) {
            return Err(Error::NotGroupElement("does not fix ξ".into()));
        }
        let a_inv = a.inverse(tol).map_err(|_| Error::NotGroupElement("singular".into()))?;
        Ok(GroupElement { a, a_inv })
    }

    pub fn identity(s: &StructureSpace<S>) -> Self {
        GroupElement {
            a: Matrix::identity(s.dim()),
            a_inv: Matrix::identity(s.dim()),
        }
    }

    /// Element acting by `t` on the `+1` eigenspace of φ and by `t⁻ᵀ` on the
    /// `−1` eigenspace (eigenvectors `e_i ± φe_i`), fixing `ξ`.
    pub fn from_block(s: &StructureSpace<S>, t: &Matrix<S>) -> Result<Self> {
        if !s.is_standard() {
            return Err(Error::NotStandardBasis);
        }
        let n = s.n;
        if t.rows() != n || t.cols() != n {
            return Err(Error::DimensionMismatch {
                what: "block matrix",
                expected: n,
                found: t.rows(),
            });
        }
        let t_dual = t.inverse(s.tol)?.transpose();
        let half = S::ratio(1, 2);
        let sum = t.add(&t_dual).scale(&half);
        let diff = t.sub(&t_dual).scale(&half);
        let d = s.dim();
        let mut a = Matrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = sum[(i, j)].clone();
                a[(n + i, n + j)] = sum[(i, j)].clone();
                a[(i, n + j)] = diff[(i, j)].clone();
                a[(n + i, j)] = diff[(i, j)].clone();
            }
        }
        a[(d - 1, d - 1)] = S::one();
        Self::new(s, a)
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &Matrix<S> {
        &self.a_inv
    }
}

/// Bound on rejection sampling of the block matrix.
pub const GROUP_SAMPLE_ATTEMPTS: usize = 64;

/// Samples a block matrix with integer entries in `[-3, 3]` until it is
/// invertible, then lifts it with [`GroupElement::from_block`].
pub fn random_group_element<S: Scalar>(s: &StructureSpace<S>, seed: u64) -> Result<GroupElement<S>> {
    if !s.is_standard() {
        return Err(Error::NotStandardBasis);
    }
    let n = s.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GROUP_SAMPLE_ATTEMPTS {
        let t = Matrix::from_fn(n, n, |_, _| S::from_i64(rng.random_range(-3..=3)));
        if t.determinant(s.tol).is_negligible(s.tol) {
            continue;
        }
        return GroupElement::from_block(s, &t);
    }
    Err(Error::SamplingExhausted(GROUP_SAMPLE_ATTEMPTS))
}

/// Random invertible integer matrix, used to move a structure into a general
/// basis.
pub fn random_basis_change<S: Scalar>(dim: usize, seed: u64) -> Matrix<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ba5e);
    loop {
        let m = Matrix::from_fn(dim, dim, |_, _| S::from_i64(rng.random_range(-2..=2)));
        if !m
            .determinant(S::default_tolerance())
            .is_negligible(S::default_tolerance())
        {
            return m;
        }
    }
}
