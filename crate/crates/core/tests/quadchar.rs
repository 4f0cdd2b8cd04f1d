mod common;

use proptest::prelude::*;
use symcube::quadchar::{
    class_number, dirichlet_l1, enumerate_discriminants, kronecker, l1_class_number_formula, l1_series, CharTable,
    DiscriminantFilter, FundamentalDiscriminant,
};

#[test]
fn class_numbers_match_dirichlet_formula() {
    for m in 3..=1500i64 {
        let d = -m;
        if !common::is_fundamental_negative(d) {
            continue;
        }
        let fd = FundamentalDiscriminant::new(d).unwrap();
        assert_eq!(class_number(fd).unwrap(), common::class_number_dirichlet(d), "h({d})");
    }
}

#[test]
fn known_small_class_numbers() {
    let table = [(-3, 1), (-4, 1), (-7, 1), (-23, 3), (-47, 5), (-71, 7), (-163, 1), (-164, 8), (-399, 16)];
    for (d, h) in table {
        assert_eq!(class_number(FundamentalDiscriminant::new(d).unwrap()).unwrap(), h, "h({d})");
    }
}

#[test]
fn smallest_window_of_the_family() {
    let f = DiscriminantFilter::new(3, 20, 1, 4).unwrap();
    let ds: Vec<i64> = enumerate_discriminants(&f).into_iter().map(|d| d.get()).collect();
    assert_eq!(ds, vec![-3, -7, -11, -15, -19]);
}

#[test]
fn non_fundamental_inputs_are_rejected() {
    for d in [0, 1, 5, -1, -2, -8 * 9, -12, -16, -27] {
        assert!(FundamentalDiscriminant::new(d).is_err(), "{d}");
    }
    assert!(DiscriminantFilter::new(10, 20, 3, 4).is_err());
    assert!(DiscriminantFilter::new(10, 20, 1, 6).is_err());
    assert!(DiscriminantFilter::new(30, 20, 1, 4).is_err());
}

#[test]
fn l1_agrees_between_formula_and_series() {
    for m in (3..=3000i64).step_by(4) {
        let Ok(d) = FundamentalDiscriminant::new(-m) else { continue };
        let a = l1_class_number_formula(d).unwrap();
        let b = l1_series(d);
        assert!(((a - b) / a).abs() < 1e-10, "d = -{m}: {a} vs {b}");
        assert_eq!(dirichlet_l1(d).unwrap(), a);
    }
}

proptest! {
    #[test]
    fn kronecker_matches_definition(m in 3i64..5000, n in 0u64..10_000) {
        prop_assume!(common::is_fundamental_negative(-m));
        prop_assert_eq!(kronecker(-m, n), common::kronecker_by_definition(-m, n));
    }

    #[test]
    fn char_table_is_periodic(m in 3i64..3000, n in 0u64..1_000_000) {
        prop_assume!(common::is_fundamental_negative(-m));
        let t = CharTable::new(FundamentalDiscriminant::new(-m).unwrap());
        prop_assert_eq!(t.chi(n), kronecker(-m, n));
    }

    #[test]
    fn enumeration_matches_brute_force(lo in 3u64..3000, len in 0u64..800, r in 0i64..4, k in 1u64..4) {
        let modulus = 4 * k;
        let residue = 1 + 4 * r;
        let Ok(f) = DiscriminantFilter::new(lo, lo + len, residue, modulus) else { return Ok(()) };
        let got: Vec<i64> = enumerate_discriminants(&f).into_iter().map(|d| d.get()).collect();
        let want: Vec<i64> = (lo..=lo + len)
            .map(|m| -(m as i64))
            .filter(|&d| d.rem_euclid(modulus as i64) == residue.rem_euclid(modulus as i64))
            .filter(|&d| common::is_fundamental_negative(d))
            .collect();
        prop_assert_eq!(got, want);
    }
}
