//! Class membership, direct-sum labels, characterization identities and the
//! rank audit of the eleven component projectors.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ftensor::{admissible_projection, assemble_from_operators, one_forms, FTensor, OperatorFamily};
use crate::matrix::{rank_of_vectors, Matrix};
use crate::projectors::{decompose, kappa, trace_template, ComponentDecomposition, CLASS_COUNT};
use crate::scalar::Scalar;
use crate::structure::{standard_structure, StructureSpace};
use crate::tensor::Tensor3;

/// Zero test relative to a reference magnitude:
/// `|x| ≤ tol·(1 + reference)`. With `tol = 0` this is an exact test.
pub fn below_threshold<S: Scalar>(magnitude: &S, reference: &S, tol: f64) -> bool {
    if tol == 0.0 {
        return magnitude.is_zero();
    }
    magnitude.clone() <= S::from_f64(tol) * &(S::one() + reference)
}

/// `"F_0"` or the ascending `" (+) "`-joined list of active classes.
pub fn label(flags: &[bool]) -> String {
    let active: Vec<String> = flags
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(i, _)| format!("F_{}", i + 1))
        .collect();
    if active.is_empty() {
        "F_0".to_string()
    } else {
        active.join(" (+) ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneFormSummary<S> {
    pub theta_xi: S,
    pub theta_star_xi: S,
    pub omega: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport<S> {
    pub n: usize,
    pub flags: [bool; CLASS_COUNT],
    pub label: String,
    pub magnitudes: Vec<S>,
    pub self_ips: Vec<S>,
    pub characterization_ok: [bool; CLASS_COUNT],
    pub one_forms: OneFormSummary<S>,
    pub tol: f64,
    /// Max-abs distance moved by the admissible projection, when the input
    /// was projected.
    pub projection_distance: Option<S>,
    pub notes: Vec<String>,
}

impl<S: Scalar> ClassificationReport<S> {
    pub fn active_classes(&self) -> Vec<usize> {
        (1..=CLASS_COUNT).filter(|&i| self.flags[i - 1]).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.active_classes().len() == 1
    }
}

pub fn classify<S: Scalar>(f: &FTensor<S>, tol: f64) -> ClassificationReport<S> {
    let dec = decompose(f);
    report_from_decomposition(&dec, tol)
}

pub fn report_from_decomposition<S: Scalar>(dec: &ComponentDecomposition<S>, tol: f64) -> ClassificationReport<S> {
    let f = &dec.input;
    let reference = f.max_abs();
    let magnitudes = dec.magnitudes();
    let mut flags = [false; CLASS_COUNT];
    let mut characterization_ok = [true; CLASS_COUNT];
    for i in 0..CLASS_COUNT {
        flags[i] = !below_threshold(&magnitudes[i], &reference, tol);
        if flags[i] {
            characterization_ok[i] = characterization_check(&dec.components[i], i + 1, tol).unwrap_or(false);
        }
    }
    let forms = one_forms(f);
    let mut notes = Vec::new();
    if flags[0] {
        notes.push(format!(
            "F_1 identity checked with coefficient 1/(2(n-1)) = {}; 1/(2n) fails theta reproduction",
            kappa::<S>(f.structure().n()).map_or("-".into(), |k| k.to_text())
        ));
    }
    ClassificationReport {
        n: f.structure().n(),
        flags,
        label: label(&flags),
        magnitudes,
        self_ips: dec.self_inner_products(),
        characterization_ok,
        one_forms: OneFormSummary {
            theta_xi: forms.theta_xi(),
            theta_star_xi: forms.theta_star_xi(),
            omega: forms.omega,
        },
        tol,
        projection_distance: None,
        notes,
    }
}

/// `F(φX, φY, Z)`.
fn phi_phi_z<S: Scalar>(s: &StructureSpace<S>, t: &Tensor3<S>) -> Tensor3<S> {
    t.pull_back([Some(s.phi()), Some(s.phi()), None])
}

/// `F(φX, Y, φZ)`.
fn phi_y_phi<S: Scalar>(s: &StructureSpace<S>, t: &Tensor3<S>) -> Tensor3<S> {
    t.pull_back([Some(s.phi()), None, Some(s.phi())])
}

/// `F(Y, Z, X)` and `F(Z, X, Y)`.
fn cyclic<S: Scalar>(t: &Tensor3<S>) -> (Tensor3<S>, Tensor3<S>) {
    (t.permute([1, 2, 0]), t.permute([2, 0, 1]))
}

/// `η(Y)g(φX,φZ) − η(Z)g(φX,φY)` (`phi_phi = true`) or
/// `η(Y)g(X,φZ) − η(Z)g(X,φY)`.
fn vertical_template<S: Scalar>(s: &StructureSpace<S>, phi_phi: bool) -> Tensor3<S> {
    let g_phi = s.g().mul(s.phi());
    let m = if phi_phi {
        s.phi().transpose().mul(&g_phi)
    } else {
        g_phi
    };
    let eta = s.eta();
    Tensor3::from_fn(s.dim(), |a, b, c| {
        eta[b].clone() * &m[(a, c)] - &(eta[c].clone() * &m[(a, b)])
    })
}

/// Evaluates the defining identity of class `i` over all basis triples.
pub fn characterization_check<S: Scalar>(f: &FTensor<S>, i: usize, tol: f64) -> Result<bool> {
    let s = f.structure().as_ref();
    let t = f.coeffs();
    let reference = t.max_abs();
    let zero = |x: &Tensor3<S>| below_threshold(&x.max_abs(), &reference, tol);
    let scalar_zero = |x: &S| below_threshold(&x.abs(), &reference, tol);
    let two_n = S::from_i64(2 * s.n() as i64);
    let forms = one_forms(f);
    let ok = match i {
        1 => match kappa::<S>(s.n()) {
            None => zero(t),
            Some(k) => {
                let h = s.h();
                let theta_h = h.left_mul_vec(&forms.theta);
                zero(&t.sub(&trace_template(s, &theta_h).scale(&k)))
            }
        },
        2 => zero(&t.add(&phi_phi_z(s, t))) && forms.theta.iter().all(&scalar_zero),
        3 => zero(&t.sub(&phi_phi_z(s, t))),
        4 => {
            let k = forms.theta_xi() / &two_n;
            zero(&t.sub(&vertical_template(s, true).scale(&k)))
        }
        5 => {
            let k = -(forms.theta_star_xi() / &two_n);
            zero(&t.sub(&vertical_template(s, false).scale(&k)))
        }
        6..=9 => {
            let pp = phi_phi_z(s, t);
            let pyp = phi_y_phi(s, t);
            let (yzx, zxy) = cyclic(t);
            let two_pp = pp.scale(&S::from_i64(2));
            let sign_first = if i <= 7 { -S::one() } else { S::one() };
            let first = pp.add(&pyp).scale(&sign_first);
            let second = match i {
                6 => zxy.sub(&yzx).sub(&two_pp),
                7 | 9 => yzx.add(&zxy).scale(&-S::one()),
                _ => zxy.sub(&yzx).add(&two_pp),
            };
            let scalar = match i {
                6 => scalar_zero(&forms.theta_star_xi()),
                7 => scalar_zero(&forms.theta_xi()),
                _ => true,
            };
            zero(&t.sub(&first)) && zero(&t.sub(&second)) && scalar
        }
        10 => {
            // F(X,Y,Z) = η(X)F(ξ,φY,φZ)
            let k = t.pull_back([None, Some(s.phi()), Some(s.phi())]);
            let xi = s.xi();
            let eta = s.eta();
            let kx = Matrix::from_fn(s.dim(), s.dim(), |b, c| {
                xi.iter()
                    .enumerate()
                    .fold(S::zero(), |acc, (a, v)| acc + &(v.clone() * &k[(a, b, c)]))
            });
            zero(&t.sub(&Tensor3::from_fn(s.dim(), |a, b, c| eta[a].clone() * &kx[(b, c)])))
        }
        11 => {
            let eta = s.eta();
            let w = &forms.omega;
            let expected = Tensor3::from_fn(s.dim(), |a, b, c| {
                eta[a].clone() * &(eta[b].clone() * &w[c] - &(eta[c].clone() * &w[b]))
            });
            zero(&t.sub(&expected))
        }
        other => return Err(Error::ClassIndex(other)),
    };
    Ok(ok)
}

pub const AUDIT_MAX_N: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionAudit {
    pub n: usize,
    /// Ranks `d₁..d₁₁` of the component projectors on the admissible space.
    pub ranks: [usize; CLASS_COUNT],
    /// Dimension of the solution space of the operator constraints.
    pub nullspace_dim: usize,
    /// Rank of the admissible projection on all `(0,3)`-tensors.
    pub projection_rank: usize,
}

impl DimensionAudit {
    pub fn total(&self) -> usize {
        self.ranks.iter().sum()
    }

    pub fn consistent(&self) -> bool {
        self.total() == self.nullspace_dim && self.nullspace_dim == self.projection_rank
    }
}

/// Residuals of the operator constraints for an unknown family
/// `(A_{e_1}, …, A_{e_2n}, A_ξ)` given as `ops[0..=2n]`, with
/// `A_{φe_i} = Σ_j φ[j][i] A_{e_j}`. Linear in the family.
pub fn operator_constraint_residuals<S: Scalar>(s: &StructureSpace<S>, ops: &[Matrix<S>]) -> Vec<S> {
    let d = s.dim();
    let two_n = d - 1;
    let g = s.g();
    let phi = s.phi();
    let eta = s.eta();
    let xi = s.xi();
    let a_xi = &ops[two_n];
    let g_a: Vec<Matrix<S>> = ops.iter().map(|m| g.mul(m)).collect();
    let g_axi = &g_a[two_n];
    let phit_g_axi = phi.transpose().mul(g_axi);
    let along = |i: usize| {
        (0..two_n).fold(Matrix::zeros(d, d), |acc, j| {
            if phi[(j, i)].is_zero() {
                acc
            } else {
                acc.add(&ops[j].scale(&phi[(j, i)]))
            }
        })
    };
    let mut out = Vec::new();
    for x in 0..d {
        for i in 0..two_n {
            for j in 0..two_n {
                out.push(g_a[i][(j, x)].clone() + &g_a[j][(i, x)]);
            }
        }
        for i in 0..two_n {
            let lhs = along(i).column(x);
            let phi_ax = phi.mul_vec(&ops[i].column(x));
            let coef = g_axi[(i, x)].clone();
            for r in 0..d {
                out.push(lhs[r].clone() + &phi_ax[r] + &(coef.clone() * &xi[r]));
            }
        }
        for i in 0..two_n {
            let eta_ax = crate::matrix::dot(eta, &ops[i].column(x));
            out.push(eta_ax + &phit_g_axi[(i, x)]);
        }
        out.push(crate::matrix::dot(eta, &a_xi.column(x)));
    }
    out
}

fn unflatten_ops<S: Scalar>(d: usize, v: &[S]) -> Vec<Matrix<S>> {
    (0..d)
        .map(|k| Matrix::from_fn(d, d, |r, c| v[(k * d + r) * d + c].clone()))
        .collect()
}

/// Null-space oracle, rank of the admissible projection and ranks of the
/// eleven component projectors, in exact arithmetic on the standard structure.
pub fn dimension_audit(n: usize) -> Result<DimensionAudit> {
    if n > AUDIT_MAX_N {
        return Err(Error::AuditGuard { n, max: AUDIT_MAX_N });
    }
    type Q = crate::scalar::Rational;
    let s: Arc<StructureSpace<Q>> = Arc::new(standard_structure(n)?);
    let d = s.dim();
    let unknowns = d * d * d;

    // constraint matrix, one column per unknown
    let columns: Vec<Vec<Q>> = (0..unknowns)
        .map(|k| {
            let mut v = vec![Q::zero(); unknowns];
            v[k] = Q::one();
            operator_constraint_residuals(&s, &unflatten_ops(d, &v))
        })
        .collect();
    let constraints = Matrix::from_columns(&columns)?;
    let basis = constraints.nullspace(0.0);
    let nullspace_dim = basis.len();

    let images: Vec<Vec<Q>> = (0..unknowns)
        .map(|k| {
            let mut t = Tensor3::zeros(d);
            let idx = (k / (d * d), (k / d) % d, k % d);
            t[idx] = Q::one();
            admissible_projection(&s, &t)
                .expect("same dimension")
                .into_coeffs()
                .into_flat()
        })
        .collect();
    let projection_rank = rank_of_vectors(&images, 0.0);

    let mut per_class: Vec<Vec<Vec<Q>>> = vec![Vec::new(); CLASS_COUNT];
    for v in &basis {
        let ops = unflatten_ops(d, v);
        let fam = OperatorFamily::new(Arc::clone(&s), ops[..d - 1].to_vec(), ops[d - 1].clone())?;
        let f = assemble_from_operators(&fam)?;
        let dec = decompose(&f);
        for (i, c) in dec.components.into_iter().enumerate() {
            per_class[i].push(c.into_coeffs().into_flat());
        }
    }
    let mut ranks = [0; CLASS_COUNT];
    for (r, vecs) in ranks.iter_mut().zip(&per_class) {
        *r = rank_of_vectors(vecs, 0.0);
    }
    Ok(DimensionAudit {
        n,
        ranks,
        nullspace_dim,
        projection_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftensor::extract_operators;
    use crate::samples::{example, random_admissible, ExampleParams};
    use crate::scalar::{q, Rational};

    type Q = Rational;

    fn ex(name: &str, vals: &[i64]) -> FTensor<Q> {
        let letters = crate::samples::parameter_letters(name).unwrap();
        let pairs: Vec<(&str, Q)> = letters.iter().zip(vals).map(|(k, v)| (*k, q(*v, 1))).collect();
        example(&ExampleParams::new(name, &pairs).unwrap()).unwrap().2
    }

    #[test]
    fn labels() {
        assert_eq!(label(&[false; 11]), "F_0");
        let mut f = [false; 11];
        f[9] = true;
        f[2] = true;
        assert_eq!(label(&f), "F_3 (+) F_10");
    }

    #[test]
    fn zero_tensor_is_f0() {
        let s = Arc::new(standard_structure::<Q>(2).unwrap());
        let r = classify(&FTensor::zero(Arc::clone(&s)), 0.0);
        assert_eq!(r.label, "F_0");
        assert!(r.flags.iter().all(|f| !f));
        for i in 1..=11 {
            assert!(characterization_check(&FTensor::zero(Arc::clone(&s)), i, 0.0).unwrap());
        }
    }

    #[test]
    fn example_classes_and_sum() {
        assert_eq!(classify(&ex("5.2", &[1, 2, 3, 4, 5, 6]), 0.0).label, "F_9");
        let f1 = ex("5.1", &[1, -2, 3, 5]);
        let f3 = ex("5.3", &[2, 7]);
        let r = classify(&f1.add(&f3).unwrap(), 0.0);
        assert_eq!(r.label, "F_3 (+) F_10");
        let dec = decompose(&f1.add(&f3).unwrap());
        assert_eq!(dec.class(3), &f1);
        assert_eq!(dec.class(10), &f3);
    }

    #[test]
    fn example_51_characterization() {
        let f = ex("5.1", &[1, 2, 3, 4]);
        assert!(characterization_check(&f, 3, 0.0).unwrap());
        assert!(!characterization_check(&f, 9, 0.0).unwrap());
        assert!(characterization_check(&f, 12, 0.0).is_err());
    }

    #[test]
    fn components_satisfy_identities() {
        for n in [1, 2] {
            let s = Arc::new(standard_structure::<Q>(n).unwrap());
            for seed in 0..5 {
                let dec = decompose(&random_admissible(&s, seed));
                for i in 1..=11 {
                    assert!(characterization_check(dec.class(i), i, 0.0).unwrap(), "n={n} class {i}");
                }
            }
        }
    }

    #[test]
    fn constraint_residuals_vanish_on_examples() {
        let f = ex("5.2", &[1, 2, 3, 4, 5, 6]);
        let fam = extract_operators(&f).unwrap();
        let mut ops = fam.operators().to_vec();
        ops.push(fam.a_xi().clone());
        assert!(operator_constraint_residuals(f.structure(), &ops)
            .iter()
            .all(|x| x == &q(0, 1)));
    }

    #[test]
    fn audit_n1() {
        let a = dimension_audit(1).unwrap();
        for i in [1, 2, 3, 6] {
            assert_eq!(a.ranks[i - 1], 0);
        }
        assert!(a.consistent());
        assert!(matches!(dimension_audit(5), Err(Error::AuditGuard { .. })));
    }

    #[test]
    fn float_threshold() {
        assert!(below_threshold(&1e-12, &10.0, 1e-9));
        assert!(!below_threshold(&1e-6, &10.0, 1e-9));
        assert!(below_threshold(&q(0, 1), &q(5, 1), 0.0));
        assert!(!below_threshold(&q(1, 1000000), &q(5, 1), 0.0));
    }
}
