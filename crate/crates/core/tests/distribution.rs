mod common;

use hybrid_noma::channel::{
    concentrator_gain, gain_sq_bounds, lambertian_order, sample_user_radii, vlc_los_gain, VlcApConfig,
};
use hybrid_noma::orderstats::{gain_sq_cdf, gain_sq_pdf, ordered_gain_sq_pdf, GainSqDistribution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{ks_distance, log_composite, rel_err};

fn table1() -> (VlcApConfig, GainSqDistribution) {
    let cfg = VlcApConfig::default();
    let d = GainSqDistribution::new(&cfg).unwrap();
    (cfg, d)
}

/// Radius whose squared gain is `t`, found by bisection on the gain map.
fn radius_by_bisection(cfg: &VlcApConfig, t: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, cfg.cell_radius);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if vlc_los_gain(cfg, mid).unwrap().powi(2) > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sampled_gains_sq(cfg: &VlcApConfig, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_user_radii(cfg.cell_radius, n, &mut rng)
        .radii
        .into_iter()
        .map(|r| vlc_los_gain(cfg, r).unwrap().powi(2))
        .collect()
}

fn grid(d: &GainSqDistribution, n: usize) -> impl Iterator<Item = f64> + '_ {
    let (a, b) = (d.lambda_min.ln(), d.lambda_max.ln());
    (0..n).map(move |i| (a + (b - a) * (i as f64 + 0.5) / n as f64).exp())
}

#[test]
fn channel_examples() {
    assert!((lambertian_order(60.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((lambertian_order(45.0).unwrap() - 2.0).abs() < 1e-12);
    assert!(lambertian_order(0.0).is_err());
    let cfg = VlcApConfig::default();
    assert!((concentrator_gain(&cfg, 30.0) - 3.0).abs() < 1e-12);
    assert!((concentrator_gain(&cfg, 60.0) - 3.0).abs() < 1e-12);
    assert_eq!(concentrator_gain(&cfg, 75.0), 0.0);
    let h0 = vlc_los_gain(&cfg, 0.0).unwrap();
    // A R T g (m+1) / (2 pi L^2) with m = 2 at the cell centre.
    let want = 1e-4 * 0.4 * 1.0 * 3.0 * 3.0 / (2.0 * std::f64::consts::PI * 2.15f64.powi(2));
    assert!(rel_err(h0, want) < 1e-12);
    assert!(vlc_los_gain(&cfg, 3.7).is_err());
}

#[test]
fn support_endpoints() {
    let (cfg, d) = table1();
    let (lo, hi) = gain_sq_bounds(&cfg).unwrap();
    assert_eq!((lo, hi), (d.lambda_min, d.lambda_max));
    assert!(gain_sq_cdf(&d, d.lambda_min).abs() < 1e-9);
    assert!((gain_sq_cdf(&d, d.lambda_max) - 1.0).abs() < 1e-9);
    assert_eq!(gain_sq_pdf(&d, d.lambda_min * 0.5), 0.0);
    assert_eq!(gain_sq_cdf(&d, d.lambda_max * 2.0), 1.0);
}

#[test]
fn densities_are_normalized() {
    for semi in [15.0, 30.0, 45.0, 60.0, 80.0] {
        let cfg = VlcApConfig {
            semi_angle_deg: semi,
            ..Default::default()
        };
        let d = GainSqDistribution::new(&cfg).unwrap();
        let total = log_composite(|t| gain_sq_pdf(&d, t), d.lambda_min, d.lambda_max, 64);
        assert!((total - 1.0).abs() < 1e-8, "semi {semi}: {total}");
        for users in [1, 2, 5, 10] {
            for k in 1..=users {
                let total = log_composite(
                    |t| ordered_gain_sq_pdf(&d, k, users, t).unwrap(),
                    d.lambda_min,
                    d.lambda_max,
                    64,
                );
                assert!((total - 1.0).abs() < 1e-8, "semi {semi} k {k}/{users}: {total}");
            }
        }
    }
}

#[test]
fn cdf_is_integrated_pdf() {
    let (_, d) = table1();
    for t in grid(&d, 100) {
        let f = log_composite(|s| gain_sq_pdf(&d, s), d.lambda_min, t, 32);
        assert!((f - gain_sq_cdf(&d, t)).abs() < 1e-8);
    }
}

#[test]
fn cdf_is_push_forward_of_disc_law() {
    let (cfg, d) = table1();
    for t in grid(&d, 100) {
        let r = radius_by_bisection(&cfg, t);
        let want = 1.0 - r * r / (cfg.cell_radius * cfg.cell_radius);
        assert!((gain_sq_cdf(&d, t) - want).abs() < 1e-10, "t {t}");
    }
}

#[test]
fn mixture_identity() {
    let (_, d) = table1();
    for users in [2, 3, 7, 10] {
        for t in grid(&d, 100) {
            let mix: f64 = (1..=users).map(|k| ordered_gain_sq_pdf(&d, k, users, t).unwrap()).sum::<f64>() / users as f64;
            let f = gain_sq_pdf(&d, t);
            assert!((mix - f).abs() <= 1e-8 * f.max(1.0), "K {users} t {t}");
        }
    }
}

#[test]
fn single_user_order_statistic_is_the_parent() {
    let (_, d) = table1();
    for t in grid(&d, 50) {
        assert_eq!(ordered_gain_sq_pdf(&d, 1, 1, t).unwrap(), gain_sq_pdf(&d, t));
    }
    assert!(ordered_gain_sq_pdf(&d, 0, 3, 1e-11).is_err());
    assert!(ordered_gain_sq_pdf(&d, 4, 3, 1e-11).is_err());
}

#[test]
fn sampled_gains_pass_ks() {
    let (cfg, d) = table1();
    let mut s = sampled_gains_sq(&cfg, 1_000_000, 11);
    let ks = ks_distance(&mut s, |t| gain_sq_cdf(&d, t));
    assert!(ks < 0.002, "KS {ks}");
}

#[test]
fn expectations_match_sampling() {
    let (cfg, d) = table1();
    let n = 200_000;
    let s = sampled_gains_sq(&cfg, 5 * n, 12);

    let mean_t = d.expect_over_ordered(1, 1, |t| t).unwrap();
    let (m, se) = mean_se(s.iter().copied());
    assert!((mean_t - m).abs() < 3.0 * se, "E[t]: {mean_t} vs {m} +- {se}");

    let max5 = d.expect_over_ordered(5, 5, |t| t).unwrap();
    let (m, se) = mean_se(s.chunks(5).map(|c| c.iter().copied().fold(0.0, f64::max)));
    assert!((max5 - m).abs() < 3.0 * se, "E[max]: {max5} vs {m} +- {se}");

    let (rho, a2) = (1e15, 0.6);
    let rate = d.expect_over_ordered(5, 5, |t| (rho * a2 * t).ln_1p() / 2f64.ln()).unwrap();
    let (m, se) = mean_se(s.chunks(5).map(|c| {
        let t = c.iter().copied().fold(0.0, f64::max);
        (rho * a2 * t).ln_1p() / 2f64.ln()
    }));
    assert!((rate - m).abs() < 3.0 * se, "rate: {rate} vs {m} +- {se}");

    assert!((d.expect_over_ordered(3, 7, |_| 1.0).unwrap() - 1.0).abs() < 1e-10);
}

fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rank_means_are_nondecreasing(
        semi in 10.0..85.0f64,
        height in 1.5..4.0f64,
        radius in 1.0..6.0f64,
        users in 2usize..9,
    ) {
        let cfg = VlcApConfig { semi_angle_deg: semi, height, cell_radius: radius, ..Default::default() };
        let d = GainSqDistribution::new(&cfg).unwrap();
        let means: Vec<f64> = (1..=users).map(|k| d.expect_over_ordered(k, users, |t| t).unwrap()).collect();
        for w in means.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        let avg = means.iter().sum::<f64>() / users as f64;
        prop_assert!(rel_err(avg, d.expect(|t| t).unwrap()) < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_bounded(semi in 10.0..85.0f64, u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let cfg = VlcApConfig { semi_angle_deg: semi, ..Default::default() };
        let d = GainSqDistribution::new(&cfg).unwrap();
        let span = d.lambda_max / d.lambda_min;
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let fa = gain_sq_cdf(&d, d.lambda_min * span.powf(a));
        let fb = gain_sq_cdf(&d, d.lambda_min * span.powf(b));
        prop_assert!((0.0..=1.0).contains(&fa) && fa <= fb && fb <= 1.0);
    }

    #[test]
    fn quantile_inverts_cdf(semi in 10.0..85.0f64, u in 0.0..1.0f64) {
        let cfg = VlcApConfig { semi_angle_deg: semi, ..Default::default() };
        let d = GainSqDistribution::new(&cfg).unwrap();
        prop_assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-10);
    }

    #[test]
    fn invalid_geometry_is_rejected(semi in prop_oneof![-10.0..=0.0f64, 90.0..200.0f64]) {
        let cfg = VlcApConfig { semi_angle_deg: semi, ..Default::default() };
        prop_assert!(GainSqDistribution::new(&cfg).is_err());
    }
}
