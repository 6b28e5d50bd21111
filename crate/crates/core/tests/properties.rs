use involucalc::algebra::{GaussRat, Poly, VarSet};
use involucalc::approx::{normal_form_vars, NormalFormField};
use involucalc::cli::parse::parse_expr;
use involucalc::fbi::sign_condition;
use proptest::prelude::*;

fn vars() -> VarSet {
    VarSet::new(&["x1", "y1", "t1"])
}

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-4i64..=4, 1i64..=3, -2i64..=2).prop_map(|(a, b, c)| &GaussRat::from_frac(a, b) + &GaussRat::complex(0, c))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..3, 3), gauss()), 0..5)
        .prop_map(|terms| Poly::from_terms(&vars(), terms))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn leibniz_rule(a in poly(), b in poly(), idx in 0usize..3) {
        let lhs = (&a * &b).derivative(idx);
        let rhs = &(&a.derivative(idx) * &b) + &(&a * &b.derivative(idx));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn printed_polynomials_parse_back(a in poly()) {
        prop_assert_eq!(parse_expr(&a.to_string(), &vars()).unwrap().as_poly().unwrap(), a);
    }

    #[test]
    fn sign_condition_is_homogeneous(c1 in -3i64..=3, c2 in -3i64..=3, xi in -5i64..=5, k in 1i64..=6) {
        prop_assume!(xi != 0);
        let v = normal_form_vars(1);
        let t = Poly::var(&v, 1);
        let x = Poly::var(&v, 0);
        let b = &(&t.scale(&GaussRat::from_int(c1)) + &(&x * &t).scale(&GaussRat::from_int(c2))) + &t.pow(2);
        let f = NormalFormField::new(vec![b], None).unwrap();
        let base = sign_condition(&f, &[GaussRat::from_int(xi)]).unwrap();
        let scaled = sign_condition(&f, &[GaussRat::from_int(k * xi)]).unwrap();
        prop_assert_eq!(scaled.value, base.value.scale_int(k));
        prop_assert_eq!(scaled.holds, base.holds);
    }
}
