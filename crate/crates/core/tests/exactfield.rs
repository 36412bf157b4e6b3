use std::collections::HashMap;

use proptest::prelude::*;
use qlax_core::exactfield::{GaussianRational, Monomial, Polynomial, RationalExpr, Symbol};

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=7, -9i64..=9, 1i64..=7).prop_map(|(a, b, c, d)| GaussianRational::from_parts((a, b), (c, d)))
}

/// A polynomial in `x, y` of degree at most `d` in each.
fn poly_deg(d: usize) -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(gaussian(), (d + 1) * (d + 1)).prop_map(move |cs| {
        let (x, y) = (Symbol::new("x"), Symbol::new("y"));
        Polynomial::from_terms(cs.into_iter().enumerate().map(|(k, c)| {
            let m = Monomial::var_pow(x, (k / (d + 1)) as u32).mul(&Monomial::var_pow(y, (k % (d + 1)) as u32));
            (m, c)
        }))
    })
}

fn poly_y() -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(gaussian(), 3).prop_map(|cs| {
        let y = Symbol::new("y");
        Polynomial::from_terms(cs.into_iter().enumerate().map(|(k, c)| (Monomial::var_pow(y, k as u32), c)))
    })
}

fn poly_xy() -> impl Strategy<Value = Polynomial> {
    poly_deg(2)
}

fn expr() -> impl Strategy<Value = RationalExpr> {
    (poly_deg(1), poly_deg(1))
        .prop_filter_map("zero denominator", |(n, d)| RationalExpr::from_fraction(n, &d).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gaussian_field_axioms(a in gaussian(), b in gaussian(), c in gaussian()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn rational_field_axioms(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), RationalExpr::one());
            prop_assert_eq!((&a * &b).checked_div(&a).unwrap(), b.clone());
        }
    }

    #[test]
    fn substitution_is_a_homomorphism(a in expr(), b in expr(), image in expr()) {
        // x ↦ image, a rational function in x and y
        let at = |e: &RationalExpr| e.subs(&[("x", image.clone())]);
        if let (Ok(sa), Ok(sb), Ok(sum), Ok(prod)) = (at(&a), at(&b), at(&(&a + &b)), at(&(&a * &b))) {
            prop_assert_eq!(sum, &sa + &sb);
            prop_assert_eq!(prod, &sa * &sb);
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in expr(), b in expr(), x in gaussian(), y in gaussian()) {
        let point = HashMap::from([(Symbol::new("x"), x), (Symbol::new("y"), y)]);
        if let (Ok(va), Ok(vb)) = (a.eval_at(&point), b.eval_at(&point)) {
            prop_assert_eq!((&a * &b).eval_at(&point).unwrap(), &va * &vb);
            prop_assert_eq!((&a - &b).eval_at(&point).unwrap(), &va - &vb);
        }
    }

    #[test]
    fn coefficients_round_trip(n in poly_xy(), d in poly_y()) {
        let Ok(e) = RationalExpr::from_fraction(n, &d) else { return Ok(()) };
        let x = Symbol::new("x");
        let cs = e.coefficients_in(x).unwrap();
        let xe = RationalExpr::symbol(x);
        let back = cs.iter().enumerate().fold(RationalExpr::zero(), |acc, (k, c)| &acc + &(c * &xe.pow(k as u32)));
        prop_assert_eq!(back, e.clone());
        prop_assert!(cs.iter().all(|c| !c.contains(x)));
    }

    #[test]
    fn literals_round_trip(a in gaussian()) {
        let back: GaussianRational = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn denominators_in_the_symbol_are_refused() {
    let x = RationalExpr::var("x");
    let e = RationalExpr::one().checked_div(&(&x + &RationalExpr::one())).unwrap();
    assert!(e.coefficients_in(Symbol::new("x")).is_err());
}

#[test]
fn cancellation_is_canonical() {
    let v = RationalExpr::var;
    let (x, y) = (v("x"), v("y"));
    let lhs = (&(&x * &x) - &(&y * &y)).checked_div(&(&x - &y)).unwrap();
    assert_eq!(lhs, &x + &y);
    assert!(lhs.denominator().as_constant().is_some());
}
