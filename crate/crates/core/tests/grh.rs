mod common;

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use symcube::grh::{
    chandee_bound, chandee_terms, char_moment_check, diagonal_sum_via_sym_powers, dirichlet_poly, exceedance_count,
    layer_cake, orthogonality_sum, twisted_lambda, twisted_lambda_square, variance_sum, PolyConfig, PrimeData,
};
use symcube::hecke::{builtin_coefficients, CoefficientTable, EigenformSpec, SatakeAngle};
use symcube::quadchar::{DiscriminantFilter, FundamentalDiscriminant};

const BOUND: u64 = 20_000;

fn tables() -> &'static (CoefficientTable, CoefficientTable) {
    static T: OnceLock<(CoefficientTable, CoefficientTable)> = OnceLock::new();
    T.get_or_init(|| {
        (
            builtin_coefficients(&EigenformSpec::delta(), BOUND as usize).unwrap(),
            builtin_coefficients(&EigenformSpec::builtin(16).unwrap(), BOUND as usize).unwrap(),
        )
    })
}

fn forms() -> Vec<Arc<PrimeData>> {
    let (a, b) = tables();
    vec![Arc::new(PrimeData::from_table(a, BOUND).unwrap()), Arc::new(PrimeData::from_table(b, BOUND).unwrap())]
}

fn fd(d: i64) -> FundamentalDiscriminant {
    FundamentalDiscriminant::new(d).unwrap()
}

/// `α^n + β^n` from `λ(p)` by the three-term recursion.
fn newton(lambda: f64, n: u32) -> f64 {
    let (mut s0, mut s1) = (2.0, lambda);
    for _ in 0..n {
        (s0, s1) = (s1, lambda * s1 - s0);
    }
    s0
}

fn sym3_at_prime(t: &CoefficientTable, p: u64) -> f64 {
    let l = t.lambda(p as usize);
    l * l * l - 2.0 * l
}

#[test]
fn chandee_bound_by_hand_at_small_x() {
    let (delta, _) = tables();
    let data = &forms()[0];
    let d = -7;
    let x: f64 = 11.0;
    let lx = x.ln();
    let mut want = 0.0;
    for (p, n) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1)] {
        let l = delta.lambda(p as usize);
        let chi = common::kronecker_by_definition(d, p) as f64;
        let q = (p as f64).powi(n as i32);
        let lam = (newton(l, 3 * n) + newton(l, n)) * chi.powi(n as i32);
        want += lam / (n as f64 * q.powf(0.5 + 1.0 / lx)) * (x / q).ln() / lx;
    }
    let got = chandee_bound(fd(d), data, x).unwrap();
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn chandee_terms_sum_in_either_order() {
    let data = &forms()[1];
    let terms = chandee_terms(fd(-1999), data, 2000.0).unwrap();
    let fwd: f64 = terms.iter().sum();
    let rev: f64 = terms.iter().rev().sum();
    assert!((fwd - rev).abs() < 1e-9);
}

#[test]
fn chandee_rejects_small_or_uncovered_x() {
    let data = &forms()[0];
    assert!(chandee_bound(fd(-7), data, 10.0).is_err());
    assert!(chandee_bound(fd(-7), data, 1e6).is_err());
}

#[test]
fn dirichlet_polynomial_brute_force() {
    let (a, b) = tables();
    let cfg = PolyConfig::new(1e4, 100.0, vec![0.5, 1.5], forms()).unwrap();
    let d = -7;
    let sigma = 0.5 + 1.0 / 1e4f64.ln();
    let mut want = 0.0;
    for p in (2..=100u64).filter(|&n| common::factor(n).len() == 1) {
        let coeff = 0.5 * sym3_at_prime(a, p) + 1.5 * sym3_at_prime(b, p);
        let pf = p as f64;
        want += coeff * common::kronecker_by_definition(d, p) as f64 * pf.powf(-sigma) * (1.0 - pf.ln() / 1e4f64.ln());
    }
    let got = dirichlet_poly(fd(d), &cfg);
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn first_character_moment_double_loop() {
    let (a, _) = tables();
    let filter = DiscriminantFilter::new(500, 1000, 1, 4).unwrap();
    let ps: Vec<u64> = (2..=20u64).filter(|&n| common::factor(n).len() == 1).collect();
    let mut lhs = 0.0;
    for m in 500..=1000i64 {
        let d = -m;
        if d.rem_euclid(4) != 1 || !common::is_fundamental_negative(d) {
            continue;
        }
        for &p in &ps {
            for &q in &ps {
                let cp = common::kronecker_by_definition(d, p) as f64;
                let cq = common::kronecker_by_definition(d, q) as f64;
                lhs += sym3_at_prime(a, p) * sym3_at_prime(a, q) * cp * cq / ((p * q) as f64).sqrt();
            }
        }
    }
    let diag: f64 = ps.iter().map(|&p| sym3_at_prime(a, p).powi(2) / p as f64).sum();
    let got = char_moment_check(&filter, 20.0, 1, |p| a.lambda(p as usize).powi(3) - 2.0 * a.lambda(p as usize));
    assert!((got.lhs - lhs).abs() < 1e-9 * lhs.abs().max(1.0), "{} vs {lhs}", got.lhs);
    assert!((got.rhs - 500.0 * diag).abs() < 1e-9 * got.rhs);
}

#[test]
fn second_moment_rhs_has_the_gaussian_constant() {
    let filter = DiscriminantFilter::new(100, 200, 1, 4).unwrap();
    let one = char_moment_check(&filter, 30.0, 2, |_| 1.0);
    let diag: f64 = [2.0f64, 3., 5., 7., 11., 13., 17., 19., 23., 29.].iter().map(|p| 1.0 / p).sum();
    assert!((one.rhs - 3.0 * 100.0 * diag * diag).abs() < 1e-9 * one.rhs);
}

#[test]
fn variance_sum_drops_exactly_the_divisors_of_d() {
    let (a, _) = tables();
    let fs = &forms()[..1];
    let v7 = variance_sum(fs, &[1.0], 1e4, 5.0, fd(-7)).unwrap();
    let v11 = variance_sum(fs, &[1.0], 1e4, 5.0, fd(-11)).unwrap();
    let want = sym3_at_prime(a, 7).powi(2) / 7.0 - sym3_at_prime(a, 11).powi(2) / 11.0;
    assert!((v11.value - v7.value - want).abs() < 1e-12);
    assert_eq!(v7.main_term, (1e4f64.ln() / 5f64.ln()).ln());
}

#[test]
fn variance_main_term_scales_with_weights() {
    let v = variance_sum(&forms(), &[1.0, 1.0], 1e4, 100.0, fd(-7)).unwrap();
    assert!((v.main_term - 2.0 * (1e4f64.ln() / 100f64.ln()).ln()).abs() < 1e-15);
}

#[test]
fn diagonal_sum_matches_sym_power_expansion() {
    let f = &forms()[0];
    let direct = orthogonality_sum(f, f, 2e4, 10.0).unwrap();
    let via = diagonal_sum_via_sym_powers(f, 2e4, 10.0).unwrap();
    assert!((direct - via).abs() < 1e-10);
    assert!(orthogonality_sum(f, f, 10.0, 20.0).is_err());
}

#[test]
fn exceedance_is_empty_for_huge_thresholds() {
    let filter = DiscriminantFilter::dyadic(1000, 1, 4).unwrap();
    let s = exceedance_count(&filter, &forms()[..1], &[1.0], 1e6, 0.1, 2e4).unwrap();
    assert_eq!(s.count, 0);
    assert!(s.sample_size > 0);
    let s = exceedance_count(&filter, &forms()[..1], &[1.0], 1.0, 0.1, 2e4).unwrap();
    assert!(s.x_capped);
    assert_eq!(s.x, 2e4);
}

proptest! {
    #[test]
    fn square_coefficient_matches_hecke_relation(theta in 0.0f64..std::f64::consts::PI, k in 0usize..400, m in 3i64..400) {
        prop_assume!(common::is_fundamental_negative(-m));
        let p = symcube::primes::primes_up_to(3000)[k];
        let a = SatakeAngle { p, theta };
        let d = fd(-m);
        prop_assert!((twisted_lambda(a, d, p, 2) - twisted_lambda_square(a, d, p)).abs() < 1e-10);
    }

    #[test]
    fn twisted_coefficient_is_a_power_sum(theta in 0.0f64..std::f64::consts::PI, k in 0usize..400, m in 3i64..400, n in 1u32..8) {
        prop_assume!(common::is_fundamental_negative(-m));
        let p = symcube::primes::primes_up_to(3000)[k];
        let chi = common::kronecker_by_definition(-m, p) as f64;
        let alpha = num_complex::Complex64::from_polar(1.0, theta);
        let beta = alpha.conj();
        let want = (alpha.powu(3 * n) + alpha.powu(n) + beta.powu(n) + beta.powu(3 * n)).re * chi.powi(n as i32);
        let got = twisted_lambda(SatakeAngle { p, theta }, fd(-m), p, n);
        prop_assert!((got - want).abs() < 1e-10, "{} vs {}", got, want);
    }

    #[test]
    fn layer_cake_recovers_the_sum(logs in proptest::collection::vec(-5.0f64..5.0, 1..40), eta in -3.0f64..3.0) {
        let direct: f64 = logs.iter().map(|l| l.exp()).sum();
        let got = layer_cake(&logs, eta);
        prop_assert!((got - direct).abs() < 1e-9 * direct);
    }
}
