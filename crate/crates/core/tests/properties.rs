use proptest::prelude::*;

use cendalg::arith::{parse_poly, MatrixDV, Poly, PolyDV, Rational};
use cendalg::conformal::{locality, locality_bound, CendElem};
use cendalg::span::HSpan;
use cendalg::weyl::{check_confluence, weyl_normal_form, WeylPoly};

fn rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        Just(Rational::from_integer(0.into())),
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into())),
    ]
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rational(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn poly_dv(max_d: usize, max_v: usize) -> impl Strategy<Value = PolyDV> {
    prop::collection::vec(poly(max_v), 0..=max_d + 1).prop_map(PolyDV::from_d_coeffs)
}

fn cend(size: usize) -> impl Strategy<Value = CendElem> {
    prop::collection::vec(poly_dv(2, 3), size * size)
        .prop_map(move |entries| CendElem::new(MatrixDV::from_entries(size, entries)))
}

fn cend_pair() -> impl Strategy<Value = (CendElem, CendElem)> {
    (1usize..=2).prop_flat_map(|n| (cend(n), cend(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_laws(a in poly(4), b in poly(4), c in poly(4)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a * &b).deriv(1), &(&a.deriv(1) * &b) + &(&a * &b.deriv(1)));
    }

    #[test]
    fn poly_dv_text_round_trip(p in poly_dv(3, 4)) {
        prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn element_text_round_trip(a in cend(2)) {
        prop_assert_eq!(CendElem::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn sesquilinearity((a, b) in cend_pair(), n in 0usize..6) {
        let da = a.d_action();
        let db = b.d_action();
        let shift = |x: &CendElem| if n == 0 { CendElem::zero(a.size()) } else { x.scale(&Rational::from_integer(n.into())) };
        let prev = if n == 0 { CendElem::zero(a.size()) } else { a.prod(&b, n - 1) };
        prop_assert_eq!(da.prod(&b, n), -shift(&prev));
        prop_assert_eq!(a.prod(&db, n), &a.prod(&b, n).d_action() + &shift(&prev));
    }

    #[test]
    fn locality_within_bound((a, b) in cend_pair()) {
        let n = locality(&a, &b).unwrap().0;
        prop_assert!(n <= locality_bound(&a, &b));
        prop_assert!(a.prod(&b, n).is_zero());
        if n > 0 {
            prop_assert!(!a.prod(&b, n - 1).is_zero());
        }
    }

    #[test]
    fn weyl_words_confluent(word in "[pq]{1,10}") {
        prop_assert!(check_confluence(&word).unwrap());
    }

    #[test]
    fn weyl_product_of_normal_forms(u in "[pq]{0,6}", w in "[pq]{0,6}") {
        let one = Rational::from_integer(1.into());
        let nf = |s: &str| weyl_normal_form(&[(one.clone(), s)]).unwrap();
        let joined = format!("{u}{w}");
        prop_assert_eq!(&nf(&u) * &nf(&w), nf(&joined));
    }

    #[test]
    fn span_contains_combinations(gens in prop::collection::vec(cend(1), 1..4), h in prop::collection::vec(poly(2), 3)) {
        let span = HSpan::new(1, 3, gens.clone()).unwrap();
        let mut x = CendElem::zero(1);
        for (g, c) in gens.iter().zip(&h) {
            x = &x + &g.mul_h(c);
            prop_assert!(span.contains(g).unwrap());
        }
        prop_assert!(span.contains(&x).unwrap());
        prop_assert!(span.rank() <= gens.len());
    }

    #[test]
    fn weyl_text_round_trip(i in 0usize..4, j in 0usize..4, c in rational()) {
        let w = WeylPoly::monomial(i, j, c);
        prop_assert_eq!(WeylPoly::parse(&w.to_string()).unwrap(), w);
    }
}
