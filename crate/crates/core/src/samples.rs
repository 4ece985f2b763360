//! The three printed five-dimensional examples as parametric families, plus
//! seeded random admissible and pure-class tensors.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::dimension_audit;
use crate::error::{Error, Result};
use crate::ftensor::{admissible_projection, assemble_from_operators, FTensor, OperatorFamily};
use crate::matrix::Matrix;
use crate::projectors::{decompose, CLASS_COUNT};
use crate::scalar::Scalar;
use crate::structure::{standard_structure, StructureSpace};
use crate::tensor::Tensor3;

pub const EXAMPLE_NAMES: [&str; 3] = ["5.1", "5.2", "5.3"];

/// Parameter letters of each example.
pub fn parameter_letters(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "5.1" => Some(&["a", "b", "c", "d"]),
        "5.2" => Some(&["a", "b", "c", "d", "e", "f"]),
        "5.3" => Some(&["a", "b"]),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleParams<S> {
    name: String,
    values: BTreeMap<String, S>,
}

impl<S: Scalar> ExampleParams<S> {
    /// Requires exactly the example's letters, each once.
    pub fn new(name: &str, values: &[(&str, S)]) -> Result<Self> {
        let letters = parameter_letters(name)
            .ok_or_else(|| Error::Params(format!("unknown example {name:?}; expected one of 5.1, 5.2, 5.3")))?;
        let mut map = BTreeMap::new();
        for (k, v) in values {
            if !letters.contains(k) {
                return Err(Error::Params(format!("example {name} has no parameter {k:?}")));
            }
            if map.insert((*k).to_string(), v.clone()).is_some() {
                return Err(Error::Params(format!("parameter {k:?} given twice")));
            }
        }
        if let Some(missing) = letters.iter().find(|k| !map.contains_key(**k)) {
            return Err(Error::Params(format!(
                "example {name} is missing parameter {missing:?}"
            )));
        }
        Ok(ExampleParams {
            name: name.to_string(),
            values: map,
        })
    }

    /// Parses `k=v,k=v`.
    pub fn parse(name: &str, spec: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Params(format!("expected k=v, got {item:?}")))?;
            pairs.push((k.trim(), S::parse_text(v.trim())?));
        }
        Self::new(name, &pairs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn get(&self, letter: &str) -> &S {
        &self.values[letter]
    }

    pub fn values(&self) -> &BTreeMap<String, S> {
        &self.values
    }
}

fn mat<S: Scalar>(rows: [[S; 5]; 5]) -> Matrix<S> {
    Matrix::from_rows(rows.into_iter().map(Vec::from).collect()).expect("5x5")
}

/// The printed operator matrices `A₁..A₄` and `A_ξ`.
pub fn example_operators<S: Scalar>(params: &ExampleParams<S>) -> (Vec<Matrix<S>>, Matrix<S>) {
    let p = |k: &str| params.get(k).clone();
    let z = S::zero;
    match params.name() {
        "5.1" => {
            let (a, b, c, d) = (p("a"), p("b"), p("c"), p("d"));
            let row = |x: &S, y: &S, u: &S, v: &S| [x.clone(), y.clone(), u.clone(), v.clone(), z()];
            let neg = |x: &S| -x.clone();
            let zr = || [z(), z(), z(), z(), z()];
            let a1 = mat([
                zr(),
                row(&a, &b, &c, &d),
                zr(),
                row(&neg(&c), &neg(&d), &neg(&a), &neg(&b)),
                zr(),
            ]);
            let a2 = mat([
                row(&neg(&a), &neg(&b), &neg(&c), &neg(&d)),
                zr(),
                row(&c, &d, &a, &b),
                zr(),
                zr(),
            ]);
            let a3 = mat([
                zr(),
                row(&c, &d, &a, &b),
                zr(),
                row(&neg(&a), &neg(&b), &neg(&c), &neg(&d)),
                zr(),
            ]);
            let a4 = mat([
                row(&neg(&c), &neg(&d), &neg(&a), &neg(&b)),
                zr(),
                row(&a, &b, &c, &d),
                zr(),
                zr(),
            ]);
            (vec![a1, a2, a3, a4], Matrix::zeros(5, 5))
        }
        "5.2" => {
            let (a, b, c, d, e, f) = (p("a"), p("b"), p("c"), p("d"), p("e"), p("f"));
            let last = |x: &S, y: &S, u: &S, v: &S| {
                let zr = || [z(), z(), z(), z(), z()];
                mat([
                    zr(),
                    zr(),
                    zr(),
                    zr(),
                    [-x.clone(), -y.clone(), -u.clone(), -v.clone(), z()],
                ])
            };
            let a1 = last(&d, &e, &a, &b);
            let a2 = last(&e, &f, &b, &c);
            let a3 = last(&a, &b, &d, &e);
            let a4 = last(&b, &c, &e, &f);
            let axi = mat([
                [a.clone(), b.clone(), d.clone(), e.clone(), z()],
                [b.clone(), c.clone(), e.clone(), f.clone(), z()],
                [-d.clone(), -e.clone(), -a.clone(), -b.clone(), z()],
                [-e, -f, -b, -c, z()],
                [z(), z(), z(), z(), z()],
            ]);
            (vec![a1, a2, a3, a4], axi)
        }
        "5.3" => {
            let (a, b) = (p("a"), p("b"));
            let col = |entries: [(usize, S); 2]| {
                let mut m = Matrix::zeros(5, 5);
                for (r, v) in entries {
                    m[(r, 4)] = v;
                }
                m
            };
            let a1 = col([(1, a.clone()), (3, b.clone())]);
            let a2 = col([(0, -a.clone()), (2, -b.clone())]);
            let a3 = col([(1, -b.clone()), (3, -a.clone())]);
            let a4 = col([(0, b), (2, a)]);
            (vec![a1, a2, a3, a4], Matrix::zeros(5, 5))
        }
        _ => unreachable!("validated by ExampleParams"),
    }
}

/// Printed closed form of Example 5.1:
/// `(aX¹+bX²+cX³+dX⁴)(Y¹Z²−Y²Z¹+Y³Z⁴−Y⁴Z³) + (cX¹+dX²+aX³+bX⁴)(Y¹Z⁴−Y²Z³+Y³Z²−Y⁴Z¹)`.
pub fn closed_form_51<S: Scalar>(params: &ExampleParams<S>) -> Tensor3<S> {
    let p = |k: &str| params.get(k).clone();
    let first = [p("a"), p("b"), p("c"), p("d"), S::zero()];
    let second = [p("c"), p("d"), p("a"), p("b"), S::zero()];
    // (Y-index, Z-index, sign), 0-based
    let yz1 = [(0, 1, 1), (1, 0, -1), (2, 3, 1), (3, 2, -1)];
    let yz2 = [(0, 3, 1), (1, 2, -1), (2, 1, 1), (3, 0, -1)];
    Tensor3::from_fn(5, |x, y, z| {
        let pick = |table: &[(usize, usize, i64)], coef: &S| {
            table
                .iter()
                .find(|&&(ty, tz, _)| ty == y && tz == z)
                .map_or(S::zero(), |&(_, _, s)| coef.clone() * &S::from_i64(s))
        };
        pick(&yz1, &first[x]) + pick(&yz2, &second[x])
    })
}

/// Closed form of Example 5.2. The printed expansion ends its `η(Z)` bracket
/// with `f(X²Z²+X⁴Z⁴)`; `printed = true` reproduces that text, `false` uses
/// `f(X²Y²+X⁴Y⁴)`, which is what the matrices assemble to.
pub fn closed_form_52<S: Scalar>(params: &ExampleParams<S>, printed: bool) -> Tensor3<S> {
    let p = |k: &str| params.get(k).clone();
    // symmetric bilinear form in (X, W) over the horizontal block, 0-based
    let mut q = Matrix::<S>::zeros(5, 5);
    let mut put = |i: usize, j: usize, v: S| {
        q[(i, j)] = q[(i, j)].clone() + &v;
        if i != j {
            q[(j, i)] = q[(j, i)].clone() + &v;
        }
    };
    put(0, 2, p("a"));
    put(0, 3, p("b"));
    put(1, 2, p("b"));
    put(1, 3, p("c"));
    put(0, 0, p("d"));
    put(2, 2, p("d"));
    put(0, 1, p("e"));
    put(2, 3, p("e"));
    put(1, 1, p("f"));
    put(3, 3, p("f"));
    let f = p("f");
    Tensor3::from_fn(5, |x, y, z| {
        let mut v = S::zero();
        if y == 4 && z < 4 {
            v = v + &q[(x, z)];
        }
        if z == 4 && y < 4 {
            if printed {
                // the f-term of the η(Z) bracket reads X²Z²+X⁴Z⁴ with Z = ξ
                let qf = if (x == 1 && y == 1) || (x == 3 && y == 3) {
                    f.clone()
                } else {
                    S::zero()
                };
                v = v - &(q[(x, y)].clone() - &qf);
            } else {
                v = v - &q[(x, y)];
            }
        }
        v
    })
}

/// Printed closed form of Example 5.3:
/// `η(X){Y¹(aZ²−bZ⁴)+Y²(bZ³−aZ¹)+Y³(aZ⁴−bZ²)+Y⁴(bZ¹−aZ³)}`.
pub fn closed_form_53<S: Scalar>(params: &ExampleParams<S>) -> Tensor3<S> {
    let a = params.get("a").clone();
    let b = params.get("b").clone();
    let mut t = Tensor3::zeros(5);
    let entries = [
        (0, 1, a.clone()),
        (0, 3, -b.clone()),
        (1, 2, b.clone()),
        (1, 0, -a.clone()),
        (2, 3, a.clone()),
        (2, 1, -b.clone()),
        (3, 0, b),
        (3, 2, -a),
    ];
    for (y, z, v) in entries {
        t[(4, y, z)] = v;
    }
    t
}

/// Standard structure at `n = 2`, the printed operators and the assembled
/// tensor, which is checked against the closed form.
#[allow(clippy::type_complexity)]
pub fn example<S: Scalar>(
    params: &ExampleParams<S>,
) -> Result<(Arc<StructureSpace<S>>, OperatorFamily<S>, FTensor<S>)> {
    let s = Arc::new(standard_structure::<S>(2)?);
    let (a, a_xi) = example_operators(params);
    let ops = OperatorFamily::new(Arc::clone(&s), a, a_xi)?;
    let f = assemble_from_operators(&ops)?;
    let expected = match params.name() {
        "5.1" => closed_form_51(params),
        "5.2" => closed_form_52(params, false),
        _ => closed_form_53(params),
    };
    if !f.coeffs().approx_eq(&expected, s.tol()) {
        return Err(Error::Params(format!(
            "example {} does not match its closed form",
            params.name()
        )));
    }
    Ok((s, ops, f))
}

/// Integer coefficients in `[−5, 5]` projected onto the admissible space.
pub fn random_admissible<S: Scalar>(s: &Arc<StructureSpace<S>>, seed: u64) -> FTensor<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Tensor3::from_fn(s.dim(), |_, _, _| S::from_i64(rng.random_range(-5..=5)));
    admissible_projection(s, &raw).expect("dimensions agree")
}

pub const PURE_SAMPLE_ATTEMPTS: u64 = 32;

/// The class-`i` component of a random admissible tensor, trying successive
/// seeds until it is nonzero.
pub fn random_pure<S: Scalar>(s: &Arc<StructureSpace<S>>, i: usize, seed: u64) -> Result<FTensor<S>> {
    if !(1..=CLASS_COUNT).contains(&i) {
        return Err(Error::ClassIndex(i));
    }
    for k in 0..PURE_SAMPLE_ATTEMPTS {
        let dec = decompose(&random_admissible(s, seed.wrapping_add(k)));
        let c = dec.class(i);
        if !c.is_zero() {
            return Ok(c.clone());
        }
    }
    let audit = dimension_audit(s.n())?;
    if audit.ranks[i - 1] == 0 {
        Err(Error::VanishingClass { class: i, dim: s.dim() })
    } else {
        Err(Error::SamplingExhausted(PURE_SAMPLE_ATTEMPTS as usize))
    }
}
