mod common;

use std::collections::HashSet;

use hybrid_noma::specialfn::{
    binom, binom_exact, compositions, exp_e1_scaled, exp_integral_e1, log_power_integral, multinomial, omega_difference,
    LogIntegralSpec,
};
use proptest::prelude::*;

use common::{e1_table, log_composite, rel_err};

fn oracle(v: f64, z: f64, a: f64, b: f64) -> f64 {
    log_composite(|t| t.powf(v) * (z * t).ln_1p(), a, b, 256)
}

#[test]
fn e1_matches_series_table() {
    let table = e1_table();
    assert_eq!(table.len(), 61);
    for (x, want) in table {
        let got = exp_integral_e1(x).unwrap();
        assert!(rel_err(got, want) < 1e-10, "E1({x}) = {got}, table {want}");
    }
}

#[test]
fn e1_reference_points() {
    assert!((exp_integral_e1(1.0).unwrap() - 0.219_383_934_395_520_27).abs() < 1e-15);
    let x = 50.0;
    let r = exp_integral_e1(x).unwrap() * x * x.exp();
    assert!((r - 1.0).abs() < 0.02);
    assert!(exp_integral_e1(0.5).unwrap() > exp_integral_e1(1.0).unwrap());
    assert!(exp_integral_e1(1.0).unwrap() > exp_integral_e1(2.0).unwrap());
    assert!(exp_integral_e1(0.0).is_err());
    assert!(exp_integral_e1(-1.0).is_err());
}

#[test]
fn scaled_e1_survives_underflow() {
    let x = 800.0;
    assert_eq!(exp_integral_e1(x).unwrap(), 0.0);
    let s = exp_e1_scaled(x).unwrap();
    // e^x E1(x) ~ Σ (-1)^k k! / x^(k+1)
    let asym: f64 = (0..6).map(|k| (-1f64).powi(k) * (1..=k).product::<i32>() as f64 / x.powi(k + 1)).sum();
    assert!(rel_err(s, asym) < 1e-8);
}

#[test]
fn log_integral_closed_forms() {
    let v = log_power_integral(LogIntegralSpec::new(0.0, 1.0, 0.0, 1.0)).unwrap();
    assert!((v - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12);
    let tiny = log_power_integral(LogIntegralSpec::new(1.0, 1e-300, 0.0, 1.0)).unwrap();
    assert!(tiny.abs() < 1e-299);
    let v = log_power_integral(LogIntegralSpec::new(-1.5, 3.0, 0.1, 2.0)).unwrap();
    let want = log_composite(|t| t.powf(-1.5) * (3.0 * t).ln_1p(), 0.1, 2.0, 512);
    assert!(rel_err(v, want) < 1e-9);
}

#[test]
fn log_integral_rejects_bad_input() {
    for (v, z, a, b) in [(0.0, 1.0, 2.0, 1.0), (0.0, -1.0, 0.1, 1.0), (-2.5, 1.0, 0.0, 1.0), (f64::NAN, 1.0, 0.1, 1.0)] {
        assert!(log_power_integral(LogIntegralSpec::new(v, z, a, b)).is_err());
    }
}

#[test]
fn omega_difference_is_the_same_integral() {
    let a = omega_difference(1e-11, 1e-10, -1.3, 1e9).unwrap();
    let b = log_power_integral(LogIntegralSpec::new(-1.3, 1e9, 1e-11, 1e-10)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn binomial_values() {
    assert_eq!(binom(5, 2), 10.0);
    for n in 0..20 {
        assert_eq!(binom(n, 0), 1.0);
    }
    assert_eq!(binom_exact(40, 20), Some(137_846_528_820));
    assert_eq!(binom(3, 5), 0.0);
    assert_eq!(binom(3, -1), 0.0);
    // Pascal's rule over the exact range.
    let mut row = vec![1u64];
    for n in 1..=60u64 {
        let mut next = vec![1u64; n as usize + 1];
        for k in 1..n as usize {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        for (k, &c) in row.iter().enumerate() {
            assert_eq!(binom_exact(n, k as u64), Some(c), "C({n},{k})");
        }
    }
}

#[test]
fn composition_examples() {
    let two: Vec<_> = compositions(2, 2).collect();
    assert_eq!(two.len(), 3);
    let set: HashSet<_> = two.into_iter().collect();
    assert_eq!(set, HashSet::from([vec![0, 2], vec![1, 1], vec![2, 0]]));
    assert_eq!(compositions(0, 7).collect::<Vec<_>>(), vec![vec![0; 7]]);
    assert_eq!(compositions(4, 3).count(), 15);
}

#[test]
fn composition_counts_are_stars_and_bars() {
    for j in 0..=8usize {
        for n in 1..=12usize {
            let all: Vec<_> = compositions(j, n).collect();
            assert_eq!(all.len() as u64, binom_exact((j + n - 1) as u64, (n - 1) as u64).unwrap());
            assert!(all.iter().all(|c| c.len() == n && c.iter().sum::<usize>() == j));
            assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
        }
    }
}

#[test]
fn multinomial_sums_to_power() {
    // Σ over compositions of j into n parts of the multinomial is n^j.
    for j in 0..7 {
        for n in 1..6 {
            let s: f64 = compositions(j, n).map(|c| multinomial(&c)).sum();
            assert_eq!(s, (n as f64).powi(j as i32));
        }
    }
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_integral_matches_quadrature(
        v in -3.0..2.0f64,
        z in log_uniform(1e-3, 1e6),
        a in log_uniform(1e-12, 1e-8),
        b in log_uniform(1e-12, 1e-8),
    ) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(b / a > 1.0 + 1e-9);
        let got = log_power_integral(LogIntegralSpec::new(v, z, a, b)).unwrap();
        let want = oracle(v, z, a, b);
        prop_assert!(rel_err(got, want) < 1e-9, "got {got}, oracle {want}");
    }

    #[test]
    fn log_integral_matches_quadrature_past_the_knee(
        v in -3.0..2.0f64,
        z in log_uniform(1e6, 1e16),
        a in log_uniform(1e-12, 1e-8),
        b in log_uniform(1e-12, 1e-8),
    ) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(b / a > 1.0 + 1e-9);
        let got = log_power_integral(LogIntegralSpec::new(v, z, a, b)).unwrap();
        let want = oracle(v, z, a, b);
        prop_assert!(rel_err(got, want) < 1e-9, "got {got}, oracle {want}");
    }

    #[test]
    fn log_integral_is_additive(
        v in -3.0..2.0f64,
        z in log_uniform(1e-3, 1e12),
        a in log_uniform(1e-12, 1e-8),
        s1 in 1.01..20.0f64,
        s2 in 1.01..20.0f64,
    ) {
        let b = a * s1;
        let c = b * s2;
        let i = |lo, hi| log_power_integral(LogIntegralSpec::new(v, z, lo, hi)).unwrap();
        let whole = i(a, c);
        prop_assert!(rel_err(i(a, b) + i(b, c), whole) < 1e-9);
    }

    #[test]
    fn e1_is_decreasing_and_positive(x in log_uniform(1e-6, 60.0), f in 1.001..3.0f64) {
        let lo = exp_integral_e1(x).unwrap();
        let hi = exp_integral_e1(x * f).unwrap();
        prop_assert!(lo > 0.0 && lo > hi);
    }

    #[test]
    fn compositions_sum_to_j(j in 0usize..10, n in 1usize..8) {
        for c in compositions(j, n) {
            prop_assert_eq!(c.len(), n);
            prop_assert_eq!(c.iter().sum::<usize>(), j);
        }
    }
}
