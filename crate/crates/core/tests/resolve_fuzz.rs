//! Planted common zeros must never be certified as resolved.

use proptest::prelude::*;

use eigenbouquet::algebra::{gcd, Monomial, Polynomial, Scalar, VarUniverse};
use eigenbouquet::resolve::{CenterSpec, ChartStatus, ChartTree, ResolveOptions};

fn cofactor() -> impl Strategy<Value = Vec<(u32, u32, i64)>> {
    prop::collection::vec((0u32..=2, 0u32..=2, -4i64..=4), 1..=4)
}

fn build(terms: &[(u32, u32, i64)], u: &std::sync::Arc<VarUniverse>) -> Polynomial {
    Polynomial::from_terms(u, terms.iter().map(|&(a, b, c)| (Monomial::from_exponents(vec![a, b]), Scalar::from_int(c))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn planted_zero_is_never_certified(
        a in -3i64..=3, b in -3i64..=3,
        f in prop::collection::vec(cofactor(), 4),
    ) {
        let u = VarUniverse::new(["x", "y"], Vec::<&str>::new()).unwrap();
        let xa = &Polynomial::var(&u, 0) - &Polynomial::from_int(&u, a);
        let yb = &Polynomial::var(&u, 1) - &Polynomial::from_int(&u, b);
        let fs: Vec<Polynomial> = f.iter().map(|t| build(t, &u)).collect();
        let g1 = &(&xa * &fs[0]) + &(&yb * &fs[1]);
        let g2 = &(&xa * &fs[2]) + &(&yb * &fs[3]);
        prop_assume!(!g1.is_zero() && !g2.is_zero());
        prop_assume!(gcd(&g1, &g2).is_constant());

        let tree = ChartTree::new(&u, vec![g1, g2], Vec::<String>::new(), ResolveOptions::default());
        let root = tree.root();
        prop_assert!(!root.status.is_resolved(), "{:?}", root.status);
        if let ChartStatus::Unresolved { witness } = &root.status {
            for w in &root.weak_gens {
                prop_assert!(w.eval(witness).is_zero(), "witness {:?} is not a zero", witness);
            }
        }
    }

    #[test]
    fn blowup_keeps_exactness(f in prop::collection::vec(cofactor(), 4)) {
        let u = VarUniverse::new(["x", "y"], Vec::<&str>::new()).unwrap();
        let (x, y) = (Polynomial::var(&u, 0), Polynomial::var(&u, 1));
        let fs: Vec<Polynomial> = f.iter().map(|t| build(t, &u)).collect();
        let g1 = &(&x * &fs[0]) + &(&y * &fs[1]);
        let g2 = &(&x * &fs[2]) + &(&y * &fs[3]);
        prop_assume!(!g1.is_zero() && !g2.is_zero());

        let mut tree = ChartTree::new(&u, vec![g1, g2], Vec::<String>::new(), ResolveOptions::default());
        let center = CenterSpec { chart_path: vec![], vars: vec!["x".into(), "y".into()] };
        match tree.blowup(&center) {
            Ok(_) => {
                prop_assert!(tree.exactness_holds());
                prop_assert!(tree.monotonicity_holds());
                prop_assert_eq!(tree.overlap_check(0, 8).failures, 0);
                for leaf in tree.leaves() {
                    if let ChartStatus::Unresolved { witness } = &leaf.status {
                        for w in &leaf.weak_gens {
                            prop_assert!(w.eval(witness).is_zero());
                        }
                    }
                }
            }
            Err(e) => prop_assert!(e.to_string().contains("vanish"), "{}", e),
        }
    }
}
