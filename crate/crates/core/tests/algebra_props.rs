use std::sync::Arc;

use proptest::prelude::*;

use eigenbouquet::algebra::{
    gcd, parse_polynomial, resultant, Field, Monomial, Polynomial, Scalar, VarUniverse,
};

fn universe() -> Arc<VarUniverse> {
    VarUniverse::new(["x", "y"], Vec::<&str>::new()).unwrap()
}

fn scalar(gaussian: bool) -> impl Strategy<Value = Scalar> {
    let part = (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Scalar::from_ratio(n, d));
    (part.clone(), part).prop_map(move |(re, im)| {
        if gaussian {
            Scalar::new(re.re().clone(), im.re().clone())
        } else {
            re
        }
    })
}

fn poly_with(gaussian: bool, max_deg: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0..=max_deg), (0..=max_deg), scalar(gaussian)), 0..=max_terms).prop_map(|terms| {
        let u = universe();
        Polynomial::from_terms(&u, terms.into_iter().map(|(a, b, c)| (Monomial::from_exponents(vec![a, b]), c)))
    })
}

fn poly() -> impl Strategy<Value = Polynomial> {
    poly_with(false, 3, 5)
}

fn point() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-5i64..=5, 1i64..=3).prop_map(|(n, d)| Scalar::from_ratio(n, d)), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn display_parses_back(p in poly_with(true, 4, 6)) {
        let back = parse_polynomial(&p.to_string(), p.universe(), Field::Gaussian).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn ring_laws(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly_with(true, 3, 5), q in poly_with(true, 3, 5), pt in point()) {
        prop_assert_eq!((&p * &q).eval(&pt), &p.eval(&pt) * &q.eval(&pt));
        prop_assert_eq!((&p + &q).eval(&pt), &p.eval(&pt) + &q.eval(&pt));
    }

    #[test]
    fn exact_division_undoes_multiplication(p in poly(), q in poly()) {
        prop_assume!(!q.is_zero());
        prop_assert_eq!((&p * &q).div_exact(&q), Some(p));
    }

    #[test]
    fn gcd_contains_planted_factor(p in poly(), q in poly(), r in poly()) {
        prop_assume!(!r.is_zero() && !p.is_zero() && !q.is_zero());
        let g = gcd(&(&p * &r), &(&q * &r));
        prop_assert!(g.div_exact(&r).is_some(), "gcd {} misses {}", g, r);
        prop_assert!((&p * &r).div_exact(&g).is_some());
        prop_assert!((&q * &r).div_exact(&g).is_some());
    }

    #[test]
    fn resultant_with_linear_factor_is_substitution(g in poly(), a in -4i64..=4) {
        let u = universe();
        prop_assume!(g.degree_in(0) >= 1);
        let lin = &Polynomial::var(&u, 0) - &Polynomial::from_int(&u, a);
        prop_assert_eq!(resultant(&lin, &g, 0), g.specialize(0, &Scalar::from_int(a)));
    }

    #[test]
    fn derivative_obeys_leibniz(p in poly(), q in poly()) {
        for v in 0..2 {
            let lhs = (&p * &q).derivative(v);
            let rhs = &(&p.derivative(v) * &q) + &(&p * &q.derivative(v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn parser_rejects_malformed_text() {
    let u = universe();
    for bad in ["", "x +", "x ^ -1", "2 / 0", "z", "(x", "x y", "x^99999", "i"] {
        let field = if bad == "i" { Field::Rational } else { Field::Gaussian };
        assert!(parse_polynomial(bad, &u, field).is_err(), "{bad:?}");
    }
}
