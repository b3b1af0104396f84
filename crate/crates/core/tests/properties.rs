//! Property tests for the series layer: ring laws on truncated series,
//! inversion, Laurent-composition consistency, and truncation soundness.

use num_rational::BigRational;
use proptest::prelude::*;
use weiermock::coeff::rat;
use weiermock::qseries::{compose_laurent, LaurentData, QSeries, QSeriesError};

type RS = QSeries<BigRational>;

const ORDER: i64 = 40;

fn series_strategy() -> impl Strategy<Value = RS> {
    proptest::collection::vec((-6i64..ORDER, -20i64..=20, 1i64..=6), 0..12).prop_map(|terms| {
        RS::from_terms(1, ORDER, terms.into_iter().map(|(e, n, d)| (e, rat(n, d)))).unwrap()
    })
}

/// A series q + higher terms with window ORDER, for composition tests.
fn unit_lead_strategy() -> impl Strategy<Value = RS> {
    proptest::collection::vec((2i64..25, -9i64..=9, 1i64..=4), 0..8).prop_map(|terms| {
        let mut all = vec![(1i64, rat(1, 1))];
        all.extend(terms.into_iter().map(|(e, n, d)| (e, rat(n, d))));
        RS::from_terms(1, 25, all).unwrap()
    })
}

proptest! {
    #[test]
    fn addition_associates(a in series_strategy(), b in series_strategy(), c in series_strategy()) {
        let lhs = a.add(&b).add(&c);
        let rhs = a.add(&b.add(&c));
        prop_assert!(lhs.agrees_with(&rhs));
        prop_assert_eq!(lhs.emax(), rhs.emax());
    }

    #[test]
    fn multiplication_distributes(a in series_strategy(), b in series_strategy(), c in series_strategy()) {
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        // Windows may differ between the two routes; compare on the
        // common one.
        let w = lhs.emax().min(rhs.emax());
        prop_assert!(lhs.truncated(w).agrees_with(&rhs.truncated(w)));
    }

    #[test]
    fn inversion_is_right_inverse(s in unit_lead_strategy()) {
        let inv = s.invert().unwrap();
        let prod = s.mul(&inv);
        prop_assert!(prod.agrees_with(&RS::one()));
        prop_assert!(prod.coeff(0, 1).unwrap() == rat(1, 1));
    }

    #[test]
    fn composition_with_pole_inverts(s in unit_lead_strategy()) {
        let ell = LaurentData::new([(-1, rat(1, 1))]);
        let composed = compose_laurent(&ell, &s).unwrap();
        prop_assert!(composed.mul(&s).agrees_with(&RS::one()));
    }

    #[test]
    fn truncation_is_loud(a in series_strategy(), b in series_strategy()) {
        let sum = a.add(&b);
        let sum_loud = matches!(
            sum.coeff(sum.emax(), 1),
            Err(QSeriesError::OutsideWindow { .. })
        );
        prop_assert!(sum_loud);
        let prod = a.mul(&b);
        let prod_loud = matches!(
            prod.coeff(prod.emax(), 1),
            Err(QSeriesError::OutsideWindow { .. })
        );
        prop_assert!(prod_loud);
        // Inside the window, reads are fine (zero below the support).
        if prod.emax() > -100 {
            prop_assert!(prod.coeff(-100, 1).is_ok());
        }
    }
}
