mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sympfact::expfact::{group_exponentials, nilpotent_exp, nilpotent_log};
use sympfact::json::{matrix_from_json, matrix_to_json, RingSpec};
use sympfact::ring::{parse_poly, parse_scalar};
use sympfact::sl2fact::{phi4, sl2_4factor_field, Frame, UnitriFactorization};
use sympfact::sympgen::eval_word;
use sympfact::{random, Field, Matrix, Poly, Ring, Scalar, Side, SymplecticForm};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-40i64..40, 1i64..20, -40i64..40, 1i64..20).prop_map(|(a, b, c, d)| Scalar::complex(a, b, c, d))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(((0u32..4, 0u32..3), scalar()), 0..5)
        .prop_map(|terms| Poly::from_terms(&["z", "w"], terms.into_iter().map(|((a, b), c)| (vec![a, b], c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_text_roundtrip(x in scalar()) {
        prop_assert_eq!(parse_scalar(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn poly_text_roundtrip(p in poly()) {
        prop_assert_eq!(parse_poly(&p.to_string(), &["z", "w"]).unwrap(), p);
    }

    #[test]
    fn field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        if !b.is_zero() {
            prop_assert_eq!(a.div(&b).unwrap().mul(&b), a);
        }
    }

    #[test]
    fn poly_product_evaluates_pointwise(p in poly(), q in poly(), x in scalar(), y in scalar()) {
        let at = |f: &Poly| f.eval_named(&[("z", x.clone()), ("w", y.clone())]).unwrap();
        prop_assert_eq!(at(&p.mul(&q)), at(&p).mul(&at(&q)));
    }

    #[test]
    fn matrix_json_roundtrip(entries in prop::collection::vec(scalar(), 6)) {
        let m = Matrix::new(2, 3, entries).unwrap();
        let v = matrix_to_json(&m);
        let back: Matrix<Scalar> = matrix_from_json(&v, &RingSpec::Gaussian).unwrap();
        prop_assert_eq!(matrix_to_json(&back), v);
        prop_assert_eq!(back, m);
    }

    /// phi4 is the product `L(z1) U(z2) L(z3) U(z4)`, and the solver inverts it.
    #[test]
    fn phi4_inverts(z in prop::array::uniform4(scalar())) {
        let m = phi4(z[0].clone(), z[1].clone(), z[2].clone(), z[3].clone());
        let l = |x: &Scalar| Matrix::elementary(2, 1, 0, x.clone());
        let u = |x: &Scalar| Matrix::elementary(2, 0, 1, x.clone());
        let expect = common::product(2, &[l(&z[0]), u(&z[1]), l(&z[2]), u(&z[3])]);
        prop_assert_eq!(common::rows(&m), expect);
        let f = sl2_4factor_field(&m, None).unwrap();
        prop_assert!(f.verify().is_ok());
    }

    #[test]
    fn sp_words_stay_symplectic(seed in any::<u64>(), n in 1usize..4, len in 0usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = eval_word(&random::sp_word(&mut rng, n, len, 3)).unwrap();
        prop_assert!(common::is_symplectic(&common::rows(&m)));
        prop_assert!(m.is_symplectic(&SymplecticForm::j(n)).unwrap());
    }

    #[test]
    fn log_exp_inverse(seed in any::<u64>(), size in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = random::nilpotent(&mut rng, size, 3);
        let u = nilpotent_exp(&n).unwrap();
        prop_assert_eq!(common::rows(&u), common::exp_nilpotent(&common::rows(&n)));
        prop_assert_eq!(nilpotent_log(&u).unwrap(), n);
    }

    #[test]
    fn grouping_count(seed in any::<u64>(), t in 1usize..8, size in 2usize..5, lower in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let first = if lower { Side::Lower } else { Side::Upper };
        let factors = random::unitri_chain(&mut rng, size, t, first, 4);
        let target = Matrix::from_rows(common::product(size, factors.iter().map(|(_, m)| m))).unwrap();
        let f = UnitriFactorization { starts_lower: lower, frame: Frame::Standard, factors, target };
        let e = group_exponentials(&f).unwrap();
        prop_assert_eq!(e.len(), t / 2 + 1);
        prop_assert!(e.verify().is_ok());
    }
}
