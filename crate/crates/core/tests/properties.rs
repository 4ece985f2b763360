use std::sync::Arc;

use proptest::prelude::*;

use paracontact::classifier::{classify, dimension_audit};
use paracontact::error::Error;
use paracontact::ftensor::{inner_product, is_admissible, FTensor};
use paracontact::projectors::{decompose, CLASS_COUNT};
use paracontact::samples::{random_admissible, random_pure};
use paracontact::structure::{build_phi_basis, random_basis_change, standard_structure, StructureSpace};
use paracontact::{Rational, Tensor3};

type Q = Rational;

fn q(p: i64, d: i64) -> Q {
    Q::new(p.into(), d.into())
}

fn st(n: usize) -> Arc<StructureSpace<Q>> {
    Arc::new(standard_structure(n).unwrap())
}

#[test]
fn golden_dimensions() {
    let expected: [(usize, [usize; 11], usize); 3] = [
        (1, [0, 0, 0, 1, 1, 0, 0, 0, 2, 0, 2], 6),
        (2, [4, 0, 4, 1, 1, 3, 3, 2, 6, 2, 4], 30),
        (3, [6, 12, 18, 1, 1, 8, 8, 6, 12, 6, 6], 84),
    ];
    for (n, ranks, total) in expected {
        let a = dimension_audit(n).unwrap();
        assert_eq!(a.ranks, ranks, "n={n}");
        assert_eq!(a.total(), total);
        assert!(a.consistent());
        assert_eq!(total, n * (n + 1) * (2 * n + 1));
    }
}

#[test]
fn random_pure_covers_nonvanishing_classes() {
    let s = st(2);
    let ranks = dimension_audit(2).unwrap().ranks;
    for i in 1..=CLASS_COUNT {
        match random_pure(&s, i, 3) {
            Ok(f) => {
                assert!(ranks[i - 1] > 0);
                assert_eq!(classify(&f, 0.0).active_classes(), vec![i]);
            }
            Err(Error::VanishingClass { class, dim }) => {
                assert_eq!((class, dim), (i, 5));
                assert_eq!(ranks[i - 1], 0);
            }
            Err(e) => panic!("class {i}: {e}"),
        }
    }
    assert_eq!(classify(&random_pure(&s, 10, 0).unwrap(), 0.0).label, "F_10");
}

#[test]
fn decomposition_commutes_with_basis_change() {
    for n in [1, 2] {
        let s = st(n);
        for seed in 0..3 {
            let f = random_admissible(&s, seed);
            let c = random_basis_change::<Q>(s.dim(), seed);
            let moved = f.transport(&c).unwrap();
            let dec = decompose(&f);
            let dec_moved = decompose(&moved);
            for i in 0..CLASS_COUNT {
                assert_eq!(dec_moved.components[i], dec.components[i].transport(&c).unwrap());
            }
            assert_eq!(classify(&moved, 0.0).flags, classify(&f, 0.0).flags);

            // recovering a phi-basis brings the structure back to standard form
            let back = build_phi_basis(moved.structure()).unwrap();
            let std_again = moved.transport(&back).unwrap();
            assert!(std_again.structure().is_standard());
            assert_eq!(classify(&std_again, 0.0).flags, classify(&f, 0.0).flags);
        }
    }
}

#[test]
fn float_mode_agrees_with_exact_mode() {
    let s = st(2);
    let sf: Arc<StructureSpace<f64>> = Arc::new(standard_structure(2).unwrap());
    for seed in 0..5 {
        let f = random_admissible(&s, seed);
        let ff = random_admissible(&sf, seed);
        for (a, b) in f.coeffs().as_slice().iter().zip(ff.coeffs().as_slice()) {
            assert!((paracontact::Scalar::to_f64(a) - b).abs() < 1e-12);
        }
        assert_eq!(classify(&f, 0.0).flags, classify(&ff, 1e-9).flags);
        assert!(decompose(&ff).residual.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decompose_is_linear(s1 in 0u64..10_000, s2 in 0u64..10_000, num in -6i64..=6, den in 1i64..=5) {
        let s = st(2);
        let f = random_admissible(&s, s1);
        let g = random_admissible(&s, s2);
        let k = q(num, den);
        let combo = f.scale(&k).add(&g).unwrap();
        let dc = decompose(&combo);
        let df = decompose(&f);
        let dg = decompose(&g);
        for i in 0..CLASS_COUNT {
            let expected = df.components[i].scale(&k).add(&dg.components[i]).unwrap();
            prop_assert_eq!(&dc.components[i], &expected);
        }
    }

    #[test]
    fn labels_survive_rescaling(seed in 0u64..10_000, num in 1i64..=9, den in 1i64..=9, neg in any::<bool>()) {
        let s = st(1);
        let f = random_admissible(&s, seed);
        let k = q(if neg { -num } else { num }, den);
        prop_assert_eq!(classify(&f.scale(&k), 0.0).flags, classify(&f, 0.0).flags);
    }

    #[test]
    fn components_are_admissible_and_orthogonal(seed in 0u64..10_000, n in 1usize..=2) {
        let s = st(n);
        let dec = decompose(&random_admissible(&s, seed));
        prop_assert!(dec.residual.is_zero());
        for i in 0..CLASS_COUNT {
            prop_assert!(is_admissible(&s, dec.components[i].coeffs()));
            for j in (i + 1)..CLASS_COUNT {
                prop_assert_eq!(inner_product(&dec.components[i], &dec.components[j]).unwrap(), q(0, 1));
            }
        }
    }

    #[test]
    fn inadmissible_tensors_are_rejected(a in 0usize..3, b in 0usize..3) {
        let s = st(1);
        let mut t = Tensor3::zeros(3);
        t[(a, b, b)] = q(1, 1);
        prop_assert!(matches!(FTensor::new(Arc::clone(&s), t), Err(Error::Inadmissible(_))));
    }
}
