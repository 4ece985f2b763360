//! Admissible `(0,3)`-tensors `F(X,Y,Z) = g((∇_X φ)Y, Z)` at a point and
//! their operator representation.
//!
//! A tensor is admissible when it is antisymmetric in its last two slots and
//! satisfies
//! `F(X,φY,φZ) = F(X,Y,Z) + η(Y)F(X,Z,ξ) − η(Z)F(X,Y,ξ)`.
//! The coefficient array is the canonical representation; the operator family
//! `(A_{e_1}, …, A_{e_2n}, A_ξ)` is a derived view that needs an adapted basis
//! (horizontal vectors first, `ξ` last).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;
use crate::structure::{GroupElement, StructureSpace};
use crate::tensor::Tensor3;

#[derive(Clone, Debug)]
pub struct FTensor<S> {
    structure: Arc<StructureSpace<S>>,
    coeffs: Tensor3<S>,
}

impl<S: Scalar> PartialEq for FTensor<S> {
    fn eq(&self, other: &Self) -> bool {
        self.structure.same_as(&other.structure) && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> FTensor<S> {
    /// Wraps a coefficient array after checking both admissibility identities.
    pub fn new(structure: Arc<StructureSpace<S>>, coeffs: Tensor3<S>) -> Result<Self> {
        check_dim(&structure, &coeffs)?;
        if let Some(defect) = admissibility_defect(&structure, &coeffs) {
            return Err(Error::Inadmissible(defect));
        }
        Ok(FTensor { structure, coeffs })
    }

    pub fn zero(structure: Arc<StructureSpace<S>>) -> Self {
        let d = structure.dim();
        FTensor {
            structure,
            coeffs: Tensor3::zeros(d),
        }
    }

    /// Caller guarantees admissibility (images of admissible tensors under
    /// the linear maps of this crate).
    pub(crate) fn from_admissible(structure: Arc<StructureSpace<S>>, coeffs: Tensor3<S>) -> Self {
        debug_assert_eq!(structure.dim(), coeffs.dim());
        FTensor { structure, coeffs }
    }

    pub fn structure(&self) -> &Arc<StructureSpace<S>> {
        &self.structure
    }

    pub fn coeffs(&self) -> &Tensor3<S> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Tensor3<S> {
        self.coeffs
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &S {
        &self.coeffs[(a, b, c)]
    }

    /// `F(X, Y, Z)` for arbitrary vectors.
    pub fn eval(&self, x: &[S], y: &[S], z: &[S]) -> S {
        let m = self.coeffs.contract_last(z);
        dot(x, &m.mul_vec(y))
    }

    pub fn max_abs(&self) -> S {
        self.coeffs.max_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_negligible(self.structure.tol())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.same_structure(rhs)?;
        Ok(self.with_coeffs(self.coeffs.add(&rhs.coeffs)))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_structure(rhs)?;
        Ok(self.with_coeffs(self.coeffs.sub(&rhs.coeffs)))
    }

    pub fn scale(&self, k: &S) -> Self {
        self.with_coeffs(self.coeffs.scale(k))
    }

    pub fn approx_eq(&self, rhs: &Self) -> bool {
        self.structure.same_as(&rhs.structure) && self.coeffs.approx_eq(&rhs.coeffs, self.structure.tol())
    }

    pub(crate) fn with_coeffs(&self, coeffs: Tensor3<S>) -> Self {
        FTensor {
            structure: Arc::clone(&self.structure),
            coeffs,
        }
    }

    pub(crate) fn same_structure(&self, rhs: &Self) -> Result<()> {
        if self.structure.same_as(&rhs.structure) {
            Ok(())
        } else {
            Err(Error::StructureMismatch)
        }
    }

    /// Re-expresses the tensor in the basis given by the columns of `c`.
    pub fn transport(&self, c: &Matrix<S>) -> Result<FTensor<S>> {
        let s = Arc::new(self.structure.transport(c)?);
        Ok(FTensor::from_admissible(
            s,
            self.coeffs.pull_back([Some(c), Some(c), Some(c)]),
        ))
    }
}

fn check_dim<S: Scalar>(s: &StructureSpace<S>, t: &Tensor3<S>) -> Result<()> {
    if s.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            what: "tensor",
            expected: s.dim(),
            found: t.dim(),
        });
    }
    Ok(())
}

/// `R(T)(X,Y,Z) = T(X,φY,φZ) − η(Y)T(X,Z,ξ) + η(Z)T(X,Y,ξ)`; an involution
/// on slot-antisymmetric tensors whose fixed points are the admissible ones.
pub fn reflection<S: Scalar>(s: &StructureSpace<S>, t: &Tensor3<S>) -> Tensor3<S> {
    let phi = s.phi();
    let eta = s.eta();
    let txi = t.contract_last(s.xi());
    let base = t.pull_back([None, Some(phi), Some(phi)]);
    Tensor3::from_fn(s.dim(), |a, b, c| {
        base[(a, b, c)].clone() - &(eta[b].clone() * &txi[(a, c)]) + &(eta[c].clone() * &txi[(a, b)])
    })
}

/// Describes the first failing admissibility identity, if any.
pub fn admissibility_defect<S: Scalar>(s: &StructureSpace<S>, t: &Tensor3<S>) -> Option<String> {
    let tol = s.tol();
    let d = s.dim();
    let swapped = t.permute([0, 2, 1]);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                if !(t[(a, b, c)].clone() + &swapped[(a, b, c)]).is_negligible(tol) {
                    return Some(format!("F(X,Y,Z)=−F(X,Z,Y) fails at ({a},{b},{c})"));
                }
            }
        }
    }
    let r = reflection(s, t);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                if !(r[(a, b, c)].clone() - &t[(a, b, c)]).is_negligible(tol) {
                    return Some(format!(
                        "F(X,φY,φZ)=F(X,Y,Z)+η(Y)F(X,Z,ξ)−η(Z)F(X,Y,ξ) fails at ({a},{b},{c})"
                    ));
                }
            }
        }
    }
    None
}

pub fn is_admissible<S: Scalar>(s: &StructureSpace<S>, t: &Tensor3<S>) -> bool {
    admissibility_defect(s, t).is_none()
}

/// `Π = ½(id + R) ∘ antisym`, the projection onto admissible tensors.
pub fn admissible_projection<S: Scalar>(structure: &Arc<StructureSpace<S>>, t: &Tensor3<S>) -> Result<FTensor<S>> {
    check_dim(structure, t)?;
    let anti = t.antisymmetrize();
    let r = reflection(structure, &anti);
    let half = S::ratio(1, 2);
    Ok(FTensor::from_admissible(
        Arc::clone(structure),
        anti.add(&r).scale(&half),
    ))
}

/// Operators `A_{e_1}..A_{e_2n}` (indices `0..2n`) and `A_ξ` in an adapted basis.
#[derive(Clone, Debug)]
pub struct OperatorFamily<S> {
    structure: Arc<StructureSpace<S>>,
    a: Vec<Matrix<S>>,
    a_xi: Matrix<S>,
}

impl<S: Scalar> PartialEq for OperatorFamily<S> {
    fn eq(&self, other: &Self) -> bool {
        self.structure.same_as(&other.structure) && self.a == other.a && self.a_xi == other.a_xi
    }
}

/// The basis is adapted when `ξ` is the last basis vector and the others
/// span the kernel of `η`.
pub fn is_adapted<S: Scalar>(s: &StructureSpace<S>) -> bool {
    let last = s.dim() - 1;
    let tol = s.tol();
    (0..s.dim()).all(|k| {
        let want = if k == last { S::one() } else { S::zero() };
        (s.xi()[k].clone() - &want).is_negligible(tol) && (s.eta()[k].clone() - &want).is_negligible(tol)
    })
}

impl<S: Scalar> OperatorFamily<S> {
    /// Validated constructor; reports the first violated constraint.
    pub fn new(structure: Arc<StructureSpace<S>>, a: Vec<Matrix<S>>, a_xi: Matrix<S>) -> Result<Self> {
        let fam = Self::unchecked(structure, a, a_xi)?;
        fam.check_constraints()?;
        Ok(fam)
    }

    /// Shape checks only.
    pub fn unchecked(structure: Arc<StructureSpace<S>>, a: Vec<Matrix<S>>, a_xi: Matrix<S>) -> Result<Self> {
        if !is_adapted(&structure) {
            return Err(Error::NotAdapted(
                "operator data needs ξ as the last basis vector and η = (0,…,0,1)".into(),
            ));
        }
        let d = structure.dim();
        if a.len() != 2 * structure.n() {
            return Err(Error::DimensionMismatch {
                what: "operator count",
                expected: 2 * structure.n(),
                found: a.len(),
            });
        }
        for m in a.iter().chain(std::iter::once(&a_xi)) {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch {
                    what: "operator matrix",
                    expected: d,
                    found: m.rows(),
                });
            }
        }
        Ok(OperatorFamily { structure, a, a_xi })
    }

    /// Completes a family whose `A_ξ` is missing by solving
    /// `η(A_{e_i}X) = −g(A_ξX, φe_i)` for the horizontal vector `A_ξX`.
    pub fn with_derived_axi(structure: Arc<StructureSpace<S>>, a: Vec<Matrix<S>>) -> Result<Self> {
        let d = structure.dim();
        let zero = Matrix::zeros(d, d);
        let partial = Self::unchecked(Arc::clone(&structure), a, zero)?;
        let s = &structure;
        let eta = s.eta();
        let horizontal = 2 * s.n();
        let mut cols = Vec::with_capacity(d);
        for x in 0..d {
            // φ(A_ξ f_x) is the g-dual of c with c_i = η(A_{e_i} f_x), c_ξ = 0
            let mut c = vec![S::zero(); d];
            for (i, ci) in c.iter_mut().enumerate().take(horizontal) {
                *ci = dot(eta, &partial.a[i].column(x));
            }
            cols.push(s.phi_of(&s.raise(&c)));
        }
        let a_xi = Matrix::from_columns(&cols)?;
        Self::new(structure, partial.a, a_xi).map_err(|e| match e {
            Error::OperatorConstraint { constraint, detail } => Error::OperatorConstraint {
                constraint,
                detail: format!("A_ξ cannot be derived consistently ({detail})"),
            },
            other => other,
        })
    }

    pub fn structure(&self) -> &Arc<StructureSpace<S>> {
        &self.structure
    }

    /// `A_{e_i}` for `i < 2n`.
    pub fn a(&self, i: usize) -> &Matrix<S> {
        &self.a[i]
    }

    pub fn operators(&self) -> &[Matrix<S>] {
        &self.a
    }

    pub fn a_xi(&self) -> &Matrix<S> {
        &self.a_xi
    }

    /// `A_Y = Σ_i Y^i A_{e_i}` for a horizontal vector `Y`.
    pub fn along(&self, y: &[S]) -> Matrix<S> {
        let d = self.structure.dim();
        let mut m = Matrix::zeros(d, d);
        for (i, ai) in self.a.iter().enumerate() {
            if !y[i].is_zero() {
                m = m.add(&ai.scale(&y[i]));
            }
        }
        m
    }

    pub fn check_constraints(&self) -> Result<()> {
        let s = &self.structure;
        let d = s.dim();
        let tol = s.tol();
        let horizontal = 2 * s.n();
        let g = s.g();
        let phi = s.phi();
        let fail = |constraint: &'static str, detail: String| Err(Error::OperatorConstraint { constraint, detail });

        // g(A_{e_i}X, e_j) = −g(A_{e_j}X, e_i)
        let ga: Vec<Matrix<S>> = self.a.iter().map(|m| g.mul(m)).collect();
        for i in 0..horizontal {
            for j in 0..horizontal {
                for x in 0..d {
                    if !(ga[i][(j, x)].clone() + &ga[j][(i, x)]).is_negligible(tol) {
                        return fail("skew pairing", format!("i={i}, j={j}, X=f_{x}"));
                    }
                }
            }
        }
        // A_{φe_i}X = −φ(A_{e_i}X) − g(A_ξX, e_i)ξ
        let ga_xi = g.mul(&self.a_xi);
        for i in 0..horizontal {
            let lhs = self.along(&phi.column(i));
            let phi_a = phi.mul(&self.a[i]);
            for x in 0..d {
                for r in 0..d {
                    let rhs = -phi_a[(r, x)].clone() - &(ga_xi[(i, x)].clone() * &s.xi()[r]);
                    if !(lhs[(r, x)].clone() - &rhs).is_negligible(tol) {
                        return fail("coupling", format!("i={i}, X=f_{x}"));
                    }
                }
            }
        }
        // η(A_{e_i}X) = −g(A_ξX, φe_i)
        let phit_g_axi = phi.transpose().mul(&ga_xi);
        for i in 0..horizontal {
            let eta_a = self.a[i].left_mul_vec(s.eta());
            for x in 0..d {
                if !(eta_a[x].clone() + &phit_g_axi[(i, x)]).is_negligible(tol) {
                    return fail("vertical part", format!("i={i}, X=f_{x}"));
                }
            }
        }
        // η(A_ξX) = 0
        if !self.a_xi.left_mul_vec(s.eta()).iter().all(|v| v.is_negligible(tol)) {
            return fail("horizontal A_ξ", "η∘A_ξ ≠ 0".into());
        }
        Ok(())
    }
}

/// `F(X,Y,Z) = Y^i g(A_{e_i}X, Z) + η(Y) g(A_ξX, φZ)`.
pub fn assemble_from_operators<S: Scalar>(ops: &OperatorFamily<S>) -> Result<FTensor<S>> {
    ops.check_constraints()?;
    let s = &ops.structure;
    let d = s.dim();
    let horizontal = 2 * s.n();
    let ga: Vec<Matrix<S>> = ops.a.iter().map(|m| s.g().mul(m)).collect();
    let phit_g_axi = s.phi().transpose().mul(&s.g().mul(&ops.a_xi));
    let coeffs = Tensor3::from_fn(d, |a, b, c| {
        if b < horizontal {
            ga[b][(c, a)].clone()
        } else {
            phit_g_axi[(c, a)].clone()
        }
    });
    Ok(FTensor::from_admissible(Arc::clone(s), coeffs))
}

/// Inverse of [`assemble_from_operators`]: `A_{e_j}f_a` is the g-dual of
/// `Z ↦ F(f_a, e_j, Z)` and `A_ξ f_a = −φ` of the g-dual of `Z ↦ F(f_a, ξ, Z)`.
pub fn extract_operators<S: Scalar>(f: &FTensor<S>) -> Result<OperatorFamily<S>> {
    let s = &f.structure;
    if !is_adapted(s) {
        return Err(Error::NotAdapted("operator view needs an adapted basis".into()));
    }
    if let Some(defect) = admissibility_defect(s, &f.coeffs) {
        return Err(Error::Inadmissible(defect));
    }
    let d = s.dim();
    let horizontal = 2 * s.n();
    let dual_columns = |j: usize| -> Vec<Vec<S>> {
        (0..d)
            .map(|a| {
                let cov: Vec<S> = (0..d).map(|c| f.coeffs[(a, j, c)].clone()).collect();
                s.raise(&cov)
            })
            .collect()
    };
    let mut a = Vec::with_capacity(horizontal);
    for j in 0..horizontal {
        a.push(Matrix::from_columns(&dual_columns(j))?);
    }
    let xi_cols: Vec<Vec<S>> = dual_columns(d - 1)
        .into_iter()
        .map(|v| s.phi_of(&v).into_iter().map(|x| -x).collect())
        .collect();
    let a_xi = Matrix::from_columns(&xi_cols)?;
    OperatorFamily::new(Arc::clone(s), a, a_xi)
}

/// `θ`, `θ*` and `ω` as covectors over the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForms<S> {
    pub theta: Vec<S>,
    pub theta_star: Vec<S>,
    pub omega: Vec<S>,
    xi: Vec<S>,
}

impl<S: Scalar> OneForms<S> {
    pub fn theta_xi(&self) -> S {
        dot(&self.theta, &self.xi)
    }

    pub fn theta_star_xi(&self) -> S {
        dot(&self.theta_star, &self.xi)
    }

    pub fn omega_xi(&self) -> S {
        dot(&self.omega, &self.xi)
    }

    pub fn theta_at(&self, x: &[S]) -> S {
        dot(&self.theta, x)
    }
}

/// `θ(X) = g^{ab}F(f_a,f_b,X)`, `θ*(X) = g^{ab}F(f_a,φf_b,X)`,
/// `ω(X) = F(ξ,ξ,X)`, summed over the full basis.
pub fn one_forms<S: Scalar>(f: &FTensor<S>) -> OneForms<S> {
    let s = &f.structure;
    let theta = f.coeffs.trace_first_two(s.g_inv());
    let theta_star = f.coeffs.trace_first_two(&s.g_inv().mul(&s.phi().transpose()));
    let xi = s.xi();
    let xixi = Matrix::from_fn(s.dim(), s.dim(), |a, b| xi[a].clone() * &xi[b]);
    let omega = f.coeffs.trace_first_two(&xixi);
    OneForms {
        theta,
        theta_star,
        omega,
        xi: xi.to_vec(),
    }
}

/// `⟨F₁,F₂⟩ = g^{aq}g^{br}g^{cs}F₁[a][b][c]F₂[q][r][s]`; indefinite.
pub fn inner_product<S: Scalar>(f1: &FTensor<S>, f2: &FTensor<S>) -> Result<S> {
    f1.same_structure(f2)?;
    Ok(raw_inner_product(&f1.structure, &f1.coeffs, &f2.coeffs))
}

pub(crate) fn raw_inner_product<S: Scalar>(s: &StructureSpace<S>, t1: &Tensor3<S>, t2: &Tensor3<S>) -> S {
    let gi = s.g_inv();
    t1.full_contraction(&t2.pull_back([Some(gi), Some(gi), Some(gi)]))
}

/// `(λ(a)F)(X,Y,Z) = F(a⁻¹X, a⁻¹Y, a⁻¹Z)`.
pub fn group_action<S: Scalar>(a: &GroupElement<S>, f: &FTensor<S>) -> Result<FTensor<S>> {
    let checked = GroupElement::new(&f.structure, a.matrix().clone())?;
    let inv = checked.inverse_matrix();
    Ok(f.with_coeffs(f.coeffs.pull_back([Some(inv), Some(inv), Some(inv)])))
}
