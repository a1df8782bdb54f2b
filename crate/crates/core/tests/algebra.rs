use gwp_core::{
    expand_change_of_variables, poly_homogeneous_degree, ChernMono, GaussRat, GradedPoly,
    HomogeneousDegree, QPoly, QRational, ULaurent,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-12i64..12, 1i64..6, -6i64..6, 1i64..4)
        .prop_map(|(a, b, c, d)| &GaussRat::ratio(a, b) + &GaussRat::ratio(c, d).scale_i())
}

fn laurent() -> impl Strategy<Value = ULaurent> {
    (-3i64..2, prop::collection::vec(gauss(), 0..5)).prop_map(|(lo, cs)| {
        ULaurent::from_scalars(
            cs.into_iter().enumerate().map(|(j, c)| (lo + j as i64, c)),
            None,
        )
    })
}

fn qpoly() -> impl Strategy<Value = QPoly> {
    prop::collection::vec(-5i64..5, 1..4).prop_map(|c| QPoly::from_ints(&c))
}

fn qrational() -> impl Strategy<Value = QRational> {
    (qpoly(), 0usize..3, 1i64..4).prop_map(|(num, pole, r)| {
        let mut den = QPoly::from_ints(&[1, -r]);
        for _ in 0..pole {
            den = &den * &QPoly::from_ints(&[1, 1]);
        }
        QRational::new(num, den).expect("nonzero denominator")
    })
}

proptest! {
    #[test]
    fn gauss_field_axioms(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        if let Some(inv) = a.inv() {
            prop_assert_eq!(&a * &inv, GaussRat::one());
        }
    }

    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn rational_field_axioms(a in qrational(), b in qrational(), c in qrational()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), QRational::one());
        }
    }

    #[test]
    fn division_undoes_multiplication(a in laurent(), lead in gauss(), tail in laurent()) {
        prop_assume!(!lead.is_zero());
        let divisor = &ULaurent::scalar(lead) + &(&tail * &ULaurent::scalar_monomial(3, GaussRat::one())).truncate(6);
        let divisor = ULaurent::from_scalars(divisor.terms().filter(|(k, _)| *k >= 0).map(|(k, p)| (k, p.as_constant().unwrap())), None);
        prop_assume!(divisor.lowest() == Some(0));
        let product = &a * &divisor;
        let back = product.div(&divisor, 6).unwrap();
        prop_assert!(back.agrees_with(&a.truncate(6)));
    }

    #[test]
    fn change_of_variables_is_multiplicative(f in qrational(), g in qrational(), d1 in -2i64..3, d2 in -2i64..3) {
        let n = 5;
        let lhs = expand_change_of_variables(&(&f * &g), d1 + d2, n).unwrap();
        let rhs = &expand_change_of_variables(&f, d1, n).unwrap() * &expand_change_of_variables(&g, d2, n).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn pole_order_is_minus_lowest(f in qrational()) {
        prop_assume!(!f.is_zero());
        let e = expand_change_of_variables(&f, 0, 4).unwrap();
        let v = f.pole_order_at_minus_one() as i64;
        prop_assert_eq!(e.lowest().map(|l| l.min(0)), Some(-v).map(|x| x.min(0)));
        if v > 0 {
            prop_assert_eq!(e.lowest(), Some(-v));
        }
    }
}

#[test]
fn homogeneity_of_chern_polynomials() {
    let c = |a, b, c| GradedPoly::monomial(ChernMono::new(a, b, c), GaussRat::one());
    assert_eq!(
        poly_homogeneous_degree(&c(0, 0, 1)),
        Some(HomogeneousDegree::Exactly(3))
    );
    assert_eq!(
        poly_homogeneous_degree(&c(0, 0, 0)),
        Some(HomogeneousDegree::Exactly(0))
    );
    assert_eq!(
        poly_homogeneous_degree(&GradedPoly::zero()),
        Some(HomogeneousDegree::Any)
    );
    assert_eq!(poly_homogeneous_degree(&(&c(1, 0, 0) + &c(0, 1, 0))), None);
}

#[test]
fn expansion_examples() {
    let q = QRational::parse("q").unwrap();
    assert_eq!(
        expand_change_of_variables(&q, 0, 2).unwrap(),
        ULaurent::parse("-1 - i*u + 1/2*u^2 + O(u^3)").unwrap()
    );
    let one = QRational::one();
    assert_eq!(
        expand_change_of_variables(&one, 2, 1).unwrap(),
        ULaurent::parse("1 - i*u + O(u^2)").unwrap()
    );
}

/// Coefficients of `1/(1 − e^{iu})` through `u^10`, from the Bernoulli
/// numbers `B_0..B_11` via `−B_n (i)^{n−1} / n!`; computed once and frozen.
#[test]
fn geometric_pole_matches_bernoulli_values() {
    let f = QRational::parse("(1)/(1 + q)").unwrap();
    let got = expand_change_of_variables(&f, 0, 10).unwrap();
    let expected = ULaurent::parse(
        "i*u^-1 + 1/2 - 1/12*i*u - 1/720*i*u^3 - 1/30240*i*u^5 - 1/1209600*i*u^7 - 1/47900160*i*u^9 + O(u^11)",
    )
    .unwrap();
    assert_eq!(got, expected);
}
