//! Projector tree splitting an admissible tensor into eleven mutually
//! orthogonal, structure-group invariant components.
//!
//! ```text
//!  F ─┬─ p₁ → W₁ ─┬─ m₁ → W₁₁ ─┬─ trace part (κ·θ template) → c₁
//!     │           │             └─ trace-free part          → c₂
//!     │           └─ m₂ ─────────────────────────────────────→ c₃
//!     ├─ p₂ → W₂ ── B = A_ξ|𝔻, split B by φ-(anti)commutation and g-(skew)symmetry
//!     │              commuting sym:  trace part → c₅, trace-free → c₆
//!     │              commuting skew: φ part     → c₄, remainder  → c₇
//!     │              anticommuting:  skew → c₈, sym → c₉
//!     ├─ p₃ ──────────────────────────────────────────────────→ c₁₀
//!     └─ p₄ ──────────────────────────────────────────────────→ c₁₁
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ftensor::{inner_product, one_forms, FTensor};
use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;
use crate::structure::StructureSpace;
use crate::tensor::Tensor3;

pub const CLASS_COUNT: usize = 11;

/// `p₁..p₄`: restriction to horizontal arguments, the `ξ`-in-`Y`/`Z` part,
/// the `ξ`-in-`X` part and the `ω` part.
pub fn p<S: Scalar>(f: &FTensor<S>, i: usize) -> Result<FTensor<S>> {
    let s = f.structure();
    let h = s.h();
    let eta = s.eta();
    let xi = s.xi();
    let d = s.dim();
    let t = f.coeffs();
    let out = match i {
        1 => t.pull_back([Some(&h), Some(&h), Some(&h)]),
        2 => {
            // G[a][b] = F(hf_a, hf_b, ξ)
            let gm = t.pull_back([Some(&h), Some(&h), None]).contract_last(xi);
            Tensor3::from_fn(d, |a, b, c| {
                eta[c].clone() * &gm[(a, b)] - &(eta[b].clone() * &gm[(a, c)])
            })
        }
        3 => {
            let k = t.pull_back([None, Some(&h), Some(&h)]);
            let kx = first_slot(&k, xi);
            Tensor3::from_fn(d, |a, b, c| eta[a].clone() * &kx[(b, c)])
        }
        4 => {
            let k = t.pull_back([None, None, Some(&h)]);
            let w: Vec<S> = (0..d).map(|c| xi_xi(&k, xi, c)).collect();
            Tensor3::from_fn(d, |a, b, c| {
                eta[a].clone() * &(eta[b].clone() * &w[c] - &(eta[c].clone() * &w[b]))
            })
        }
        other => return Err(Error::ClassIndex(other)),
    };
    Ok(f.with_coeffs(out))
}

/// `M[b][c] = Σ_a v[a] T[a][b][c]`.
fn first_slot<S: Scalar>(t: &Tensor3<S>, v: &[S]) -> Matrix<S> {
    let d = t.dim();
    Matrix::from_fn(d, d, |b, c| {
        let mut acc = S::zero();
        for (a, va) in v.iter().enumerate() {
            if !va.is_zero() {
                acc = acc + &(va.clone() * &t[(a, b, c)]);
            }
        }
        acc
    })
}

fn xi_xi<S: Scalar>(t: &Tensor3<S>, xi: &[S], c: usize) -> S {
    let mut acc = S::zero();
    for (a, xa) in xi.iter().enumerate() {
        if xa.is_zero() {
            continue;
        }
        for (b, xb) in xi.iter().enumerate() {
            if !xb.is_zero() {
                acc = acc + &(xa.clone() * xb * &t[(a, b, c)]);
            }
        }
    }
    acc
}

fn require_fixed<S: Scalar>(f: &FTensor<S>, i: usize, subspace: &'static str) -> Result<()> {
    if p(f, i)?.approx_eq(f) {
        Ok(())
    } else {
        Err(Error::NotInSubspace { subspace })
    }
}

/// `F(φX, φY, Z)`.
fn phi_phi_first<S: Scalar>(f: &FTensor<S>) -> Tensor3<S> {
    let phi = f.structure().phi();
    f.coeffs().pull_back([Some(phi), Some(phi), None])
}

/// Splits a `W₁` tensor into `(m₁F, m₂F)` with
/// `m₁F = ½(F − F(φ·,φ·,·))` and `m₂F = ½(F + F(φ·,φ·,·))`.
pub fn w1_split<S: Scalar>(fw1: &FTensor<S>) -> Result<(FTensor<S>, FTensor<S>)> {
    require_fixed(fw1, 1, "W₁")?;
    let swapped = phi_phi_first(fw1);
    let half = S::ratio(1, 2);
    let m1 = fw1.coeffs().sub(&swapped).scale(&half);
    let m2 = fw1.coeffs().add(&swapped).scale(&half);
    Ok((fw1.with_coeffs(m1), fw1.with_coeffs(m2)))
}

/// Normalisation of the trace template on `W₁₁`: `1/(2(n−1))`; undefined at
/// `n = 1`, where `W₁₁` is trivial.
pub fn kappa<S: Scalar>(n: usize) -> Option<S> {
    (n >= 2).then(|| S::one() / S::from_i64(2 * (n as i64 - 1)))
}

/// `g(X,φY)θ(φZ) − g(X,φZ)θ(φY) − g(φX,φY)θ(Z) + g(φX,φZ)θ(Y)`.
pub fn trace_template<S: Scalar>(s: &StructureSpace<S>, theta: &[S]) -> Tensor3<S> {
    let g_phi = s.g().mul(s.phi());
    let pgp = s.phi().transpose().mul(&g_phi);
    let theta_phi = s.phi().left_mul_vec(theta);
    Tensor3::from_fn(s.dim(), |a, b, c| {
        g_phi[(a, b)].clone() * &theta_phi[c]
            - &(g_phi[(a, c)].clone() * &theta_phi[b])
            - &(pgp[(a, b)].clone() * &theta[c])
            + &(pgp[(a, c)].clone() * &theta[b])
    })
}

fn require_w11<S: Scalar>(f: &FTensor<S>) -> Result<()> {
    require_fixed(f, 1, "W₁₁")?;
    let swapped = phi_phi_first(f);
    if f.coeffs().add(&swapped).is_negligible(f.structure().tol()) {
        Ok(())
    } else {
        Err(Error::NotInSubspace { subspace: "W₁₁" })
    }
}

/// Splits a `W₁₁` tensor into its `θ`-determined part (class 1) and the
/// `θ`-free remainder (class 2).
pub fn m3_refine<S: Scalar>(fw11: &FTensor<S>) -> Result<(FTensor<S>, FTensor<S>)> {
    require_w11(fw11)?;
    let s = fw11.structure();
    let Some(k) = kappa::<S>(s.n()) else {
        let zero = FTensor::zero(Arc::clone(s));
        return Ok((zero.clone(), zero));
    };
    let theta = one_forms(fw11).theta;
    let c1 = trace_template(s, &theta).scale(&k);
    let c2 = fw11.coeffs().sub(&c1);
    Ok((fw11.with_coeffs(c1), fw11.with_coeffs(c2)))
}

/// The scalar `κ` for which `κ·template(θ_F)` reproduces `θ_F`, computed
/// from a single `W₁₁` tensor with `θ ≠ 0`. `None` when `θ_F = 0` or the
/// template's `θ` is not proportional to `θ_F`.
pub fn kappa_from_theta_reproduction<S: Scalar>(fw11: &FTensor<S>) -> Option<S> {
    let s = fw11.structure();
    let tol = s.tol();
    let theta = one_forms(fw11).theta;
    let template = FTensor::from_admissible(Arc::clone(s), trace_template(s, &theta));
    let theta_t = one_forms(&template).theta;
    let pivot = theta.iter().position(|x| !x.is_negligible(tol))?;
    let ratio = theta_t[pivot].clone() / &theta[pivot];
    if ratio.is_negligible(tol) {
        return None;
    }
    let proportional = theta
        .iter()
        .zip(&theta_t)
        .all(|(a, b)| (ratio.clone() * a - b).is_negligible(tol));
    proportional.then(|| S::one() / ratio)
}

/// `B = A_ξ` of a `W₂` tensor, as an endomorphism killing `ξ`:
/// `B f_a = −φ(g-dual of Z ↦ F(hf_a, ξ, Z))`.
pub fn extract_axi<S: Scalar>(fw2: &FTensor<S>) -> Result<Matrix<S>> {
    require_fixed(fw2, 2, "W₂")?;
    let s = fw2.structure();
    let d = s.dim();
    let h = s.h();
    let xi = s.xi();
    let t = fw2.coeffs().pull_back([Some(&h), None, None]);
    let cols: Vec<Vec<S>> = (0..d)
        .map(|a| {
            let cov: Vec<S> = (0..d)
                .map(|c| {
                    let mut acc = S::zero();
                    for (q, xq) in xi.iter().enumerate() {
                        if !xq.is_zero() {
                            acc = acc + &(xq.clone() * &t[(a, q, c)]);
                        }
                    }
                    acc
                })
                .collect();
            s.phi_of(&s.raise(&cov)).into_iter().map(|x| -x).collect()
        })
        .collect();
    Matrix::from_columns(&cols)
}

fn require_horizontal_endo<S: Scalar>(s: &StructureSpace<S>, b: &Matrix<S>) -> Result<()> {
    let tol = s.tol();
    let d = s.dim();
    if b.rows() != d || b.cols() != d {
        return Err(Error::DimensionMismatch {
            what: "horizontal endomorphism",
            expected: d,
            found: b.rows(),
        });
    }
    let kills_xi = b.mul_vec(s.xi()).iter().all(|x| x.is_negligible(tol));
    let horizontal = b.left_mul_vec(s.eta()).iter().all(|x| x.is_negligible(tol));
    if kills_xi && horizontal {
        Ok(())
    } else {
        Err(Error::NotInSubspace {
            subspace: "horizontal endomorphisms",
        })
    }
}

/// Splits `B` into six parts keyed by class index `4..=9`; the parts sum to `B`.
pub fn w2_operator_split<S: Scalar>(s: &StructureSpace<S>, b: &Matrix<S>) -> Result<BTreeMap<usize, Matrix<S>>> {
    require_horizontal_endo(s, b)?;
    let half = S::ratio(1, 2);
    let phi = s.phi();
    let two_n = S::from_i64(2 * s.n() as i64);
    let pbp = phi.mul(b).mul(phi);
    let commuting = b.add(&pbp).scale(&half);
    let anti = b.sub(&pbp).scale(&half);
    let sym = |m: &Matrix<S>| m.add(&s.adjoint(m)).scale(&half);
    let skew = |m: &Matrix<S>| m.sub(&s.adjoint(m)).scale(&half);

    let c_sym = sym(&commuting);
    let c_skew = skew(&commuting);
    let b5 = s.h().scale(&(c_sym.trace() / &two_n));
    let b6 = c_sym.sub(&b5);
    let b4 = phi.scale(&(c_skew.mul(phi).trace() / &two_n));
    let b7 = c_skew.sub(&b4);
    let b8 = skew(&anti);
    let b9 = sym(&anti);
    Ok(BTreeMap::from([(4, b4), (5, b5), (6, b6), (7, b7), (8, b8), (9, b9)]))
}

/// `F(X,Y,Z) = −η(Y)g(φ(B hX), Z) + η(Z)g(φ(B hX), Y)`.
pub fn reassemble_w2<S: Scalar>(s: &Arc<StructureSpace<S>>, b: &Matrix<S>) -> Result<FTensor<S>> {
    require_horizontal_endo(s, b)?;
    let eta = s.eta();
    // n[c][a] = g(φ B h f_a, f_c)
    let n = s.g().mul(s.phi()).mul(b).mul(&s.h());
    let coeffs = Tensor3::from_fn(s.dim(), |a, bb, c| {
        eta[c].clone() * &n[(bb, a)] - &(eta[bb].clone() * &n[(c, a)])
    });
    Ok(FTensor::from_admissible(Arc::clone(s), coeffs))
}

/// The eleven components of a tensor, indexed `0..11` for classes `1..=11`.
#[derive(Clone, Debug)]
pub struct ComponentDecomposition<S> {
    pub input: FTensor<S>,
    pub components: Vec<FTensor<S>>,
    pub residual: FTensor<S>,
}

impl<S: Scalar> ComponentDecomposition<S> {
    /// Component of class `i` (1-based).
    pub fn class(&self, i: usize) -> &FTensor<S> {
        &self.components[i - 1]
    }

    pub fn magnitudes(&self) -> Vec<S> {
        self.components.iter().map(FTensor::max_abs).collect()
    }

    pub fn self_inner_products(&self) -> Vec<S> {
        self.components
            .iter()
            .map(|c| inner_product(c, c).expect("components share the input structure"))
            .collect()
    }

    /// `⟨c_i, c_j⟩` for all pairs.
    pub fn gram(&self) -> Vec<Vec<S>> {
        self.components
            .iter()
            .map(|a| {
                self.components
                    .iter()
                    .map(|b| inner_product(a, b).expect("components share the input structure"))
                    .collect()
            })
            .collect()
    }
}

pub fn decompose<S: Scalar>(f: &FTensor<S>) -> ComponentDecomposition<S> {
    let s = f.structure();
    let w1 = p(f, 1).expect("valid index");
    let w2 = p(f, 2).expect("valid index");
    let (m1, m2) = w1_split(&w1).expect("p₁ image lies in W₁");
    let (c1, c2) = m3_refine(&m1).expect("m₁ image lies in W₁₁");
    let b = extract_axi(&w2).expect("p₂ image lies in W₂");
    let parts = w2_operator_split(s, &b).expect("A_ξ is horizontal");

    let mut components = vec![c1, c2, m2];
    for (_, part) in parts {
        components.push(reassemble_w2(s, &part).expect("parts are horizontal"));
    }
    components.push(p(f, 3).expect("valid index"));
    components.push(p(f, 4).expect("valid index"));

    let total = components
        .iter()
        .fold(Tensor3::zeros(s.dim()), |acc, c| acc.add(c.coeffs()));
    let residual = f.with_coeffs(f.coeffs().sub(&total));
    ComponentDecomposition {
        input: f.clone(),
        components,
        residual,
    }
}

/// `θ` of a tensor evaluated on each basis vector; exposed for cross-checks.
pub fn theta_values<S: Scalar>(f: &FTensor<S>) -> Vec<S> {
    let forms = one_forms(f);
    (0..f.structure().dim())
        .map(|i| dot(&forms.theta, &crate::matrix::unit(f.structure().dim(), i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ftensor::is_admissible;
    use crate::samples::{example, random_admissible, ExampleParams};
    use crate::scalar::{q, Rational};
    use crate::structure::standard_structure;

    type Q = Rational;

    fn st(n: usize) -> Arc<StructureSpace<Q>> {
        Arc::new(standard_structure(n).unwrap())
    }

    fn nonzero_classes(dec: &ComponentDecomposition<Q>) -> Vec<usize> {
        (1..=CLASS_COUNT).filter(|&i| !dec.class(i).is_zero()).collect()
    }

    #[test]
    fn p_operators_partition_identity() {
        let s = st(2);
        let f = random_admissible(&s, 3);
        let parts: Vec<FTensor<Q>> = (1..=4).map(|i| p(&f, i).unwrap()).collect();
        let sum = parts
            .iter()
            .skip(1)
            .fold(parts[0].clone(), |acc, x| acc.add(x).unwrap());
        assert_eq!(sum, f);
        for i in 1..=4 {
            for j in 1..=4 {
                let pij = p(&parts[j - 1], i).unwrap();
                if i == j {
                    assert_eq!(pij, parts[i - 1]);
                } else {
                    assert!(pij.is_zero(), "p{i}∘p{j}");
                }
            }
        }
        assert!(matches!(p(&f, 5), Err(Error::ClassIndex(5))));
    }

    #[test]
    fn example_53_is_pure_p3() {
        let (_, _, f) = example(&ExampleParams::new("5.3", &[("a", q(1, 1)), ("b", q(2, 1))]).unwrap()).unwrap();
        assert_eq!(p(&f, 3).unwrap(), f);
        for i in [1, 2, 4] {
            assert!(p(&f, i).unwrap().is_zero());
        }
    }

    #[test]
    fn w1_split_on_example_51() {
        let params = ExampleParams::new(
            "5.1",
            &[("a", q(1, 1)), ("b", q(-2, 1)), ("c", q(3, 1)), ("d", q(1, 2))],
        )
        .unwrap();
        let (_, _, f) = example(&params).unwrap();
        let (m1, m2) = w1_split(&f).unwrap();
        assert!(m1.is_zero());
        assert_eq!(m2, f);
        let zero = FTensor::zero(Arc::clone(f.structure()));
        let (z1, z2) = w1_split(&zero).unwrap();
        assert!(z1.is_zero() && z2.is_zero());
    }

    #[test]
    fn w1_split_rejects_outside_w1() {
        let (_, _, f) = example(&ExampleParams::new("5.3", &[("a", q(1, 1)), ("b", q(0, 1))]).unwrap()).unwrap();
        assert!(matches!(w1_split(&f), Err(Error::NotInSubspace { .. })));
    }

    #[test]
    fn m1_part_anticommutes() {
        let s = st(2);
        let f = random_admissible(&s, 8);
        let (m1, _) = w1_split(&p(&f, 1).unwrap()).unwrap();
        let swapped = phi_phi_first(&m1);
        assert_eq!(swapped, m1.coeffs().scale(&q(-1, 1)));
    }

    #[test]
    fn m3_refine_theta_free_and_fixed_points() {
        let s = st(3);
        let f = random_admissible(&s, 21);
        let (m1, _) = w1_split(&p(&f, 1).unwrap()).unwrap();
        let (c1, c2) = m3_refine(&m1).unwrap();
        assert!(one_forms(&c2).theta.iter().all(|x| x == &q(0, 1)));
        assert_eq!(one_forms(&c1).theta, one_forms(&m1).theta);
        let (c1b, c2b) = m3_refine(&c2).unwrap();
        assert!(c1b.is_zero());
        assert_eq!(c2b, c2);
        let (c1c, c2c) = m3_refine(&c1).unwrap();
        assert_eq!(c1c, c1);
        assert!(c2c.is_zero());
    }

    #[test]
    fn kappa_oracle_selects_one_candidate() {
        for n in [2usize, 3] {
            let s = st(n);
            let f = random_admissible(&s, 5);
            let (m1, _) = w1_split(&p(&f, 1).unwrap()).unwrap();
            let k = kappa_from_theta_reproduction(&m1).unwrap();
            assert_eq!(k, q(1, 2 * (n as i64 - 1)));
            assert_ne!(k, q(1, 2 * n as i64));
            assert_eq!(Some(k), kappa::<Q>(n));
        }
        assert_eq!(kappa::<Q>(1), None);
    }

    #[test]
    fn extract_axi_on_example_52() {
        let vals = [("a", 1), ("b", 2), ("c", -1), ("d", 3), ("e", 5), ("f", -4)];
        let params = ExampleParams::new("5.2", &vals.map(|(k, v)| (k, q(v, 1)))).unwrap();
        let (_, ops, f) = example(&params).unwrap();
        let b = extract_axi(&f).unwrap();
        assert_eq!(&b, ops.a_xi());
        let parts = w2_operator_split(f.structure(), &b).unwrap();
        for (k, m) in &parts {
            assert_eq!(m.is_negligible(0.0), *k != 9, "part {k}");
        }
        assert_eq!(reassemble_w2(f.structure(), &b).unwrap(), f);
    }

    #[test]
    fn w2_split_of_identity_and_phi() {
        let s = st(2);
        let h = s.h();
        let parts = w2_operator_split(&s, &h).unwrap();
        for (k, m) in &parts {
            if *k == 5 {
                assert_eq!(m, &h);
            } else {
                assert!(m.is_negligible(0.0));
            }
        }
        let parts = w2_operator_split(&s, s.phi()).unwrap();
        for (k, m) in &parts {
            if *k == 4 {
                assert_eq!(m, s.phi());
            } else {
                assert!(m.is_negligible(0.0));
            }
        }
    }

    #[test]
    fn reassemble_trace_part_matches_f5_form() {
        let vals = [("a", 2), ("b", 1), ("c", 3), ("d", -1), ("e", 0), ("f", 1)];
        let (_, ops, _) = example(&ExampleParams::new("5.2", &vals.map(|(k, v)| (k, q(v, 1)))).unwrap()).unwrap();
        let s = ops.structure();
        // a commuting g-symmetric perturbation so the trace part is nonzero
        let b = ops.a_xi().add(&s.h().scale(&q(3, 1)));
        let parts = w2_operator_split(s, &b).unwrap();
        let f5 = reassemble_w2(s, &parts[&5]).unwrap();
        let theta_star_xi = -parts[&5].trace();
        assert_eq!(one_forms(&f5).theta_star_xi(), theta_star_xi);
        let g_phi = s.g().mul(s.phi());
        let eta = s.eta();
        let k = -theta_star_xi / q(4, 1);
        let expected = Tensor3::from_fn(5, |a, bb, c| {
            k.clone() * &(eta[bb].clone() * &g_phi[(a, c)] - &(eta[c].clone() * &g_phi[(a, bb)]))
        });
        assert_eq!(f5.coeffs(), &expected);
    }

    #[test]
    fn reassembled_parts_stay_in_w2() {
        let s = st(2);
        let f = random_admissible(&s, 17);
        let b = extract_axi(&p(&f, 2).unwrap()).unwrap();
        assert!(reassemble_w2(&s, &Matrix::zeros(5, 5)).unwrap().is_zero());
        for (_, part) in w2_operator_split(&s, &b).unwrap() {
            let t = reassemble_w2(&s, &part).unwrap();
            assert_eq!(p(&t, 2).unwrap(), t);
            assert!(is_admissible(&s, t.coeffs()));
        }
    }

    type Case<'a> = (&'a str, &'a [(&'a str, i64)], usize);

    #[test]
    fn printed_examples_decompose_to_single_class() {
        let cases: [Case; 3] = [
            ("5.1", &[("a", 1), ("b", 2), ("c", -3), ("d", 4)], 3),
            ("5.2", &[("a", 1), ("b", 2), ("c", 3), ("d", 4), ("e", 5), ("f", 6)], 9),
            ("5.3", &[("a", 3), ("b", -1)], 10),
        ];
        for (name, vals, class) in cases {
            let pairs: Vec<(&str, Q)> = vals.iter().map(|&(k, v)| (k, q(v, 1))).collect();
            let (_, _, f) = example(&ExampleParams::new(name, &pairs).unwrap()).unwrap();
            let dec = decompose(&f);
            assert_eq!(nonzero_classes(&dec), vec![class], "example {name}");
            assert!(dec.residual.is_zero());
        }
    }

    #[test]
    fn n1_decomposition_vanishing() {
        let s = st(1);
        for seed in 0..10 {
            let dec = decompose(&random_admissible(&s, seed));
            for i in [1, 2, 3, 6] {
                assert!(dec.class(i).is_zero());
            }
        }
    }
}
