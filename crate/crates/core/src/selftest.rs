//! Property suites run by the `selftest` subcommand.

use std::sync::Arc;

use num_traits::Zero;

use crate::classifier::{characterization_check, classify, dimension_audit, AUDIT_MAX_N};
use crate::error::Result;
use crate::ftensor::{group_action, inner_product, is_admissible, FTensor};
use crate::projectors::{decompose, kappa, kappa_from_theta_reproduction, p, w1_split, CLASS_COUNT};
use crate::samples::{example, parameter_letters, random_admissible, ExampleParams, EXAMPLE_NAMES};
use crate::scalar::{Rational, Scalar};
use crate::structure::{random_group_element, standard_structure, StructureSpace};

type Q = Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn render(&self) -> String {
        let mut out = format!("selftest n={} trials={} seed={}\n", self.n, self.trials, self.seed);
        for s in &self.suites {
            let mark = if s.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark} {:<24} {}\n", s.name, s.detail));
        }
        let total = self.suites.len();
        let ok = self.suites.iter().filter(|s| s.passed).count();
        out.push_str(&format!("{ok}/{total} suites passed\n"));
        out
    }
}

fn outcome(name: &'static str, failures: Vec<String>, checked: usize) -> SuiteResult {
    match failures.first() {
        None => SuiteResult {
            name,
            passed: true,
            detail: format!("{checked} checks"),
        },
        Some(first) => SuiteResult {
            name,
            passed: false,
            detail: format!("{} of {checked} failed; first: {first}", failures.len()),
        },
    }
}

fn seeds(seed: u64, trials: usize) -> impl Iterator<Item = u64> {
    (0..trials as u64).map(move |k| seed.wrapping_mul(1_000_003).wrapping_add(k))
}

fn sample(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> Vec<(u64, FTensor<Q>)> {
    seeds(seed, trials).map(|k| (k, random_admissible(s, k))).collect()
}

pub fn completeness(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> SuiteResult {
    let mut fails = Vec::new();
    for (k, f) in sample(s, seed, trials) {
        if !decompose(&f).residual.is_zero() {
            fails.push(format!("seed {k}"));
        }
    }
    outcome("completeness", fails, trials)
}

pub fn orthogonality(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> SuiteResult {
    let mut fails = Vec::new();
    let mut checked = 0;
    for (k, f) in sample(s, seed, trials) {
        let gram = decompose(&f).gram();
        for (i, row) in gram.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if i != j {
                    checked += 1;
                    if !v.is_zero() {
                        fails.push(format!("seed {k}: <c{}, c{}> = {}", i + 1, j + 1, v.to_text()));
                    }
                }
            }
        }
    }
    outcome("orthogonality", fails, checked)
}

pub fn idempotence(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> SuiteResult {
    let mut fails = Vec::new();
    let mut checked = 0;
    for (k, f) in sample(s, seed, trials) {
        for (i, c) in decompose(&f).components.iter().enumerate() {
            checked += 1;
            let again = decompose(c);
            let ok = again
                .components
                .iter()
                .enumerate()
                .all(|(j, cj)| if j == i { cj == c } else { cj.is_zero() });
            if !ok {
                fails.push(format!("seed {k}, class {}", i + 1));
            }
        }
    }
    outcome("idempotence", fails, checked)
}

pub fn equivariance(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> Result<SuiteResult> {
    let mut fails = Vec::new();
    let mut checked = 0;
    for (k, f) in sample(s, seed, trials) {
        let a = random_group_element(s, k)?;
        let moved = group_action(&a, &f)?;
        let lhs = decompose(&moved);
        let rhs = decompose(&f);
        for i in 0..CLASS_COUNT {
            checked += 1;
            if lhs.components[i] != group_action(&a, &rhs.components[i])? {
                fails.push(format!("seed {k}, class {}", i + 1));
            }
        }
        checked += 1;
        if inner_product(&moved, &moved)? != inner_product(&f, &f)? {
            fails.push(format!("seed {k}: inner product changed"));
        }
    }
    Ok(outcome("equivariance", fails, checked))
}

pub fn admissibility_closure(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> SuiteResult {
    let mut fails = Vec::new();
    for (k, f) in sample(s, seed, trials) {
        for (i, c) in decompose(&f).components.iter().enumerate() {
            if !is_admissible(s, c.coeffs()) {
                fails.push(format!("seed {k}, class {}", i + 1));
            }
        }
    }
    outcome("admissibility closure", fails, trials * CLASS_COUNT)
}

pub fn characterization(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> SuiteResult {
    let mut fails = Vec::new();
    for (k, f) in sample(s, seed, trials) {
        let dec = decompose(&f);
        for i in 1..=CLASS_COUNT {
            let c = dec.class(i);
            if !characterization_check(c, i, 0.0).unwrap_or(false) {
                fails.push(format!("seed {k}, class {i}"));
            }
            if !c.is_zero() && classify(c, 0.0).active_classes() != vec![i] {
                fails.push(format!("seed {k}, class {i} not pure"));
            }
        }
    }
    outcome("characterization", fails, trials * CLASS_COUNT)
}

/// Only meaningful at `n = 1`; elsewhere it reports a skipped suite.
pub fn low_dimension_vanishing(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> Result<SuiteResult> {
    if s.n() != 1 {
        return Ok(SuiteResult {
            name: "n=1 vanishing",
            passed: true,
            detail: "skipped (n != 1)".into(),
        });
    }
    let mut fails = Vec::new();
    for (k, f) in sample(s, seed, trials) {
        let dec = decompose(&f);
        for i in [1, 2, 3, 6] {
            if !dec.class(i).is_zero() {
                fails.push(format!("seed {k}, class {i}"));
            }
        }
    }
    let audit = dimension_audit(1)?;
    for i in [1, 2, 3, 6] {
        if audit.ranks[i - 1] != 0 {
            fails.push(format!("d{i} = {}", audit.ranks[i - 1]));
        }
    }
    Ok(outcome("n=1 vanishing", fails, trials * 4 + 4))
}

pub fn kappa_resolution(s: &Arc<StructureSpace<Q>>, seed: u64, trials: usize) -> SuiteResult {
    let n = s.n();
    let mut fails = Vec::new();
    let mut checked = 0;
    if n == 1 {
        checked += 1;
        if kappa::<Q>(1).is_some() {
            fails.push("kappa defined at n=1".into());
        }
    }
    for (k, f) in sample(s, seed, trials) {
        if n == 1 {
            break;
        }
        let Ok((m1, _)) = w1_split(&p(&f, 1).expect("valid index")) else {
            fails.push(format!("seed {k}: w1 split"));
            continue;
        };
        if let Some(found) = kappa_from_theta_reproduction(&m1) {
            checked += 1;
            if Some(found.clone()) != kappa::<Q>(n) {
                fails.push(format!("seed {k}: oracle gives {}", found.to_text()));
            }
        }
    }
    outcome("kappa resolution", fails, checked)
}

pub fn printed_examples(seed: u64, trials: usize) -> Result<SuiteResult> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut fails = Vec::new();
    let mut checked = 0;
    let expected = [3, 9, 10];
    for (name, class) in EXAMPLE_NAMES.iter().zip(expected) {
        for _ in 0..trials.clamp(1, 10) {
            let letters = parameter_letters(name).expect("known example");
            let values: Vec<(&str, Q)> = letters
                .iter()
                .map(|k| {
                    let num = rng.random_range(1..=9i64) * if rng.random_bool(0.5) { 1 } else { -1 };
                    (*k, Q::ratio(num, rng.random_range(1..=5)))
                })
                .collect();
            let (_, _, f) = example(&ExampleParams::new(name, &values)?)?;
            checked += 1;
            let got = classify(&f, 0.0).active_classes();
            if got != vec![class] {
                fails.push(format!("example {name}: classes {got:?}"));
            }
        }
    }
    Ok(outcome("printed examples", fails, checked))
}

pub fn dimension_agreement(n: usize) -> Result<SuiteResult> {
    if n > AUDIT_MAX_N.min(3) {
        return Ok(SuiteResult {
            name: "dimension audit",
            passed: true,
            detail: format!("skipped (n = {n} > 3)"),
        });
    }
    let audit = dimension_audit(n)?;
    let fails = if audit.consistent() {
        Vec::new()
    } else {
        vec![format!(
            "sum {} / null space {} / rank {}",
            audit.total(),
            audit.nullspace_dim,
            audit.projection_rank
        )]
    };
    Ok(outcome("dimension audit", fails, 1))
}

/// Runs every suite on the standard structure of dimension `2n+1`.
pub fn run_suites(n: usize, trials: usize, seed: u64) -> Result<SelftestReport> {
    let s: Arc<StructureSpace<Q>> = Arc::new(standard_structure(n)?);
    let (a, b) = std::thread::scope(|scope| {
        let first = scope.spawn(|| {
            vec![
                completeness(&s, seed, trials),
                orthogonality(&s, seed, trials),
                idempotence(&s, seed, trials),
            ]
        });
        let second = scope.spawn(|| -> Result<Vec<SuiteResult>> {
            Ok(vec![
                equivariance(&s, seed, trials)?,
                admissibility_closure(&s, seed, trials),
                characterization(&s, seed, trials),
            ])
        });
        (
            first.join().expect("suite thread panicked"),
            second.join().expect("suite thread panicked"),
        )
    });
    let mut suites = a;
    suites.extend(b?);
    suites.push(low_dimension_vanishing(&s, seed, trials)?);
    suites.push(kappa_resolution(&s, seed, trials));
    suites.push(printed_examples(seed, trials)?);
    suites.push(dimension_agreement(n)?);
    Ok(SelftestReport {
        n,
        trials,
        seed,
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_selftest_passes() {
        let r = run_suites(1, 3, 7).unwrap();
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.suites.len(), 10);
    }
}
