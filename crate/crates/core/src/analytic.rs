//! Deterministic average sum rates.
//!
//! NOMA-VLC and OFDMA-VLC are computed from the rank-`k` gain densities in
//! [`crate::orderstats`]. Three routes are available:
//!
//! * [`VlcRoute::Quadrature`] integrates each user's rate against its ordered
//!   density directly. This is the default.
//! * [`VlcRoute::Binomial`] expands `F^(k-1) (1-F)^(K-k)` into powers of `t`, so
//!   each term is a `∫ t^v ln(1 + z t) dt` evaluated by
//!   [`crate::specialfn::log_power_integral`]. It agrees with the quadrature
//!   route and serves as its cross-check.
//! * [`VlcRoute::AsPrinted`] is the literal closed-form coefficient structure
//!   (`Xi` in place of the density constant, and a `b` slope that subtracts
//!   the error variance). It is kept for comparison only and does not match
//!   the simulated rates.
//!
//! For `k < K` the NOMA rate splits as
//! `log2(1 + t S_{>=k} / c) - log2(1 + t S_{>k} / c)` with `c = 1/rho + sigma^2`,
//! which is what the binomial and RF routes integrate.
//!
//! NOMA-RF uses the estimated-gain law `X = |h_hat|^2 ~ Exp(mean v(d))` with
//! `v(d) = d^-PL - sigma^2` and the distance density `2d / D^2`. Gauss–Chebyshev
//! quadrature over `d` turns the survival function into an exponential mixture
//! `S(x) ≈ Σ_i w_i e^(-x / v_i)`; expanding powers of `S` over compositions
//! gives every order-statistic expectation as a sum of `e^mu E1(mu)` terms.

use crate::channel::{RfApConfig, VlcApConfig};
use crate::error::{Error, Result};
use crate::orderstats::GainSqDistribution;
use crate::rate::{
    noma_user_rate, ofdma_vlc_user_rate, NomaAllocation, OfdmaAllocation, RateEstimate, StrongestUserSinr,
};
use crate::specialfn::{binom, compositions, exp_e1_scaled, omega_difference};

const LN2: f64 = std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VlcRoute {
    #[default]
    Quadrature,
    Binomial,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalyticOptions {
    pub route: VlcRoute,
    pub strongest: StrongestUserSinr,
}

fn check_link(rho: f64, sigma_sq: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::domain("sum_rate", format!("transmit SNR {rho} must be positive")));
    }
    if !(sigma_sq >= 0.0 && sigma_sq.is_finite()) {
        return Err(Error::domain("sum_rate", format!("error variance {sigma_sq} must be >= 0")));
    }
    Ok(())
}

pub fn analytic_noma_vlc_sum_rate(
    cfg: &VlcApConfig,
    alloc: &NomaAllocation,
    rho: f64,
    sigma_sq: f64,
) -> Result<RateEstimate> {
    analytic_noma_vlc_sum_rate_with(cfg, alloc, rho, sigma_sq, AnalyticOptions::default())
}

pub fn analytic_noma_vlc_sum_rate_with(
    cfg: &VlcApConfig,
    alloc: &NomaAllocation,
    rho: f64,
    sigma_sq: f64,
    opts: AnalyticOptions,
) -> Result<RateEstimate> {
    check_link(rho, sigma_sq)?;
    let dist = GainSqDistribution::new(cfg)?;
    let users = alloc.users();
    match opts.route {
        VlcRoute::Quadrature => {
            let per_user = (1..=users)
                .map(|k| {
                    dist.expect_over_ordered(k, users, |t| noma_user_rate(t, k, alloc, rho, sigma_sq, opts.strongest))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RateEstimate::analytic(per_user))
        }
        VlcRoute::Binomial => {
            let c = 1.0 / rho + sigma_sq;
            let per_user = (1..=users)
                .map(|k| {
                    if k < users {
                        let hi = expected_log_binomial(&dist, k, users, alloc.tail_from(k) / c)?;
                        let lo = expected_log_binomial(&dist, k, users, alloc.tail_after(k) / c)?;
                        Ok((hi - lo) / LN2)
                    } else {
                        strongest_binomial(&dist, users, alloc.power(k), rho, sigma_sq, opts.strongest)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RateEstimate::analytic(per_user))
        }
        VlcRoute::AsPrinted => as_printed_noma(cfg, &dist, alloc, rho, sigma_sq),
    }
}

fn strongest_binomial(
    dist: &GainSqDistribution,
    users: usize,
    power: f64,
    rho: f64,
    sigma_sq: f64,
    form: StrongestUserSinr,
) -> Result<f64> {
    match form {
        StrongestUserSinr::Consistent => {
            Ok(expected_log_binomial(dist, users, users, power / (1.0 / rho + sigma_sq))? / LN2)
        }
        StrongestUserSinr::AsPrinted => {
            // ln(1 + s + rho a t) = ln(1 + s) + ln(1 + rho a t / (1 + s))
            let z = rho * power / (1.0 + sigma_sq);
            Ok((sigma_sq.ln_1p() + expected_log_binomial(dist, users, users, z)?) / LN2)
        }
    }
}

/// `E[ln(1 + z t)]` under the rank-`k` density, by binomial expansion of the
/// order-statistic weight into a finite sum of power-law integrals.
pub fn expected_log_binomial(dist: &GainSqDistribution, k: usize, users: usize, z: f64) -> Result<f64> {
    crate::orderstats::check_rank(k, users)?;
    if z == 0.0 {
        return Ok(0.0);
    }
    let p = dist.p();
    let omega = dist.omega();
    let big_a = 1.0 + dist.height * dist.height / (dist.cell_radius * dist.cell_radius);
    let lead = k as f64 * binom(users as i64, k as i64) * p * omega;
    let mut total = 0.0;
    for a in 0..k {
        let ca = binom(k as i64 - 1, a as i64) * big_a.powi((k - 1 - a) as i32) * (-omega).powi(a as i32);
        for b in 0..=(users - k) {
            let cb = binom((users - k) as i64, b as i64)
                * omega.powi(b as i32)
                * (1.0 - big_a).powi((users - k - b) as i32);
            let v = -p * (a + b + 1) as f64 - 1.0;
            total += ca * cb * omega_difference(dist.lambda_min, dist.lambda_max, v, z)?;
        }
    }
    Ok(lead * total)
}

/// Literal closed-form coefficient structure, evaluated term by term.
fn as_printed_noma(
    cfg: &VlcApConfig,
    dist: &GainSqDistribution,
    alloc: &NomaAllocation,
    rho: f64,
    sigma_sq: f64,
) -> Result<RateEstimate> {
    let users = alloc.users();
    let xi = cfg.xi();
    let m = dist.m;
    let ratio = cfg.height * cfg.height / (cfg.cell_radius * cfg.cell_radius);
    let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
    let (lmin, lmax) = (dist.lambda_min, dist.lambda_max);

    let mut per_user = vec![0.0; users];
    let b1 = rho * alloc.power(users) + sigma_sq;
    let mut vs = 0.0;
    for l in 0..users {
        let v1 = -((l + 1) as f64) / (m + 3.0) - 1.0;
        let coef = fact(users - 1) * (-xi).powi(l as i32) / (fact(l) * fact(users - 1 - l) * (v1 + 1.0))
            * (ratio + 1.0).powi((users - 1 - l) as i32);
        vs += coef * omega_difference(lmin, lmax, v1, b1)?;
    }
    per_user[users - 1] = xi * users as f64 / (LN2 * (m + 3.0)) * vs;

    for k in 1..users {
        let b2 = rho * (alloc.power(k) - sigma_sq) / alloc.tail_after(k);
        if !(b2 > 0.0) {
            return Err(Error::domain("as_printed_noma", format!("slope b2 = {b2} for rank {k} is not positive")));
        }
        let mut qs = 0.0;
        for p in 0..k {
            for q in 0..=(users - k) {
                let v2 = -((p + q + 1) as f64) / (m + 3.0) - 1.0;
                let sign = if (p + users - k - q) % 2 == 0 { 1.0 } else { -1.0 };
                let coef = fact(users) * xi.powi((p + q) as i32) * sign
                    / (fact(p) * fact(k - 1 - p) * fact(q) * fact(users - k - q))
                    * (ratio + 1.0).powi((k - 1 - p) as i32)
                    * ratio.powi((users - k - q) as i32);
                qs += coef * omega_difference(lmin, lmax, v2, b2)?;
            }
        }
        per_user[k - 1] = xi * users as f64 / (LN2 * (m + 3.0)) * qs;
    }
    Ok(RateEstimate::analytic(per_user))
}

pub fn analytic_ofdma_vlc_sum_rate(
    cfg: &VlcApConfig,
    alloc: &OfdmaAllocation,
    rho: f64,
    sigma_sq: f64,
) -> Result<RateEstimate> {
    analytic_ofdma_vlc_sum_rate_with(cfg, alloc, rho, sigma_sq, VlcRoute::Quadrature)
}

pub fn analytic_ofdma_vlc_sum_rate_with(
    cfg: &VlcApConfig,
    alloc: &OfdmaAllocation,
    rho: f64,
    sigma_sq: f64,
    route: VlcRoute,
) -> Result<RateEstimate> {
    check_link(rho, sigma_sq)?;
    let dist = GainSqDistribution::new(cfg)?;
    let users = alloc.users();
    match route {
        VlcRoute::Quadrature => {
            let per_user = (1..=users)
                .map(|k| dist.expect_over_ordered(k, users, |t| ofdma_vlc_user_rate(t, k, alloc, rho, sigma_sq)))
                .collect::<Result<Vec<_>>>()?;
            Ok(RateEstimate::analytic(per_user))
        }
        VlcRoute::Binomial => {
            let per_user = (1..=users)
                .map(|k| {
                    let w = alloc.bandwidth_fractions[k - 1];
                    let z = rho * w / (alloc.power_fractions[k - 1] * (1.0 + rho * sigma_sq));
                    Ok(0.5 * w * expected_log_binomial(&dist, k, users, z)? / LN2)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RateEstimate::analytic(per_user))
        }
        VlcRoute::AsPrinted => {
            let xi = cfg.xi();
            let m = dist.m;
            let ratio = cfg.height * cfg.height / (cfg.cell_radius * cfg.cell_radius);
            let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
            let mut per_user = vec![0.0; users];
            for k in 1..=users {
                let b3 = rho * alloc.bandwidth_fractions[k - 1]
                    / (alloc.power_fractions[k - 1] * (1.0 + rho * sigma_sq));
                for p in 0..k {
                    for q in 0..=(users - k) {
                        let v3 = -((p + q + 1) as f64) / (m + 3.0) - 1.0;
                        let sign = if (p + users - k - q) % 2 == 0 { 1.0 } else { -1.0 };
                        let coef = fact(users) * xi.powi((p + q + 1) as i32) * sign
                            / (2.0 * LN2 * fact(p) * fact(k - 1 - p) * fact(q) * fact(users - k - q) * (v3 + 1.0) * (m + 3.0))
                            * ratio.powi((users - k - q) as i32)
                            * (ratio + 1.0).powi((k - 1 - p) as i32);
                        per_user[k - 1] += coef * omega_difference(dist.lambda_min, dist.lambda_max, v3, b3)?;
                    }
                }
            }
            Ok(RateEstimate::analytic(per_user))
        }
    }
}

/// Gauss–Chebyshev nodes for the distance law `2d / D^2` on `[0, D]`.
#[derive(Debug, Clone)]
pub struct ChebyshevMixture {
    pub weights: Vec<f64>,
    /// Mean of `|h_hat|^2` at each node, `x_i^-PL - sigma^2`.
    pub means: Vec<f64>,
    pub distances: Vec<f64>,
}

impl ChebyshevMixture {
    pub fn new(cfg: &RfApConfig, sigma_sq: f64) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.chebyshev_order;
        let d = cfg.cell_radius;
        let mut weights = Vec::with_capacity(n);
        let mut means = Vec::with_capacity(n);
        let mut distances = Vec::with_capacity(n);
        for i in 1..=n {
            let theta = (2 * i - 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            let x = 0.5 * d * (1.0 + theta.cos());
            let path_gain = x.powf(-cfg.path_loss_exp);
            let v = path_gain - sigma_sq;
            if !(v > 0.0) {
                return Err(Error::ChebyshevNode {
                    node: i,
                    distance: x,
                    path_gain,
                    sigma_sq,
                });
            }
            weights.push(std::f64::consts::PI / (n as f64 * d) * theta.sin().abs() * x);
            means.push(v);
            distances.push(x);
        }
        Ok(ChebyshevMixture {
            weights,
            means,
            distances,
        })
    }

    /// Approximate `P[X > x]`.
    pub fn survival(&self, x: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.means)
            .map(|(w, v)| w * (-x / v).exp())
            .sum()
    }

    /// `(coefficient, decay)` for every term of `S(x)^j = Σ c e^(-mu x)`.
    fn power_terms(&self, j: usize) -> Vec<(f64, f64)> {
        let n = self.weights.len();
        // table[i][t] = w_i^t / t!
        let table: Vec<Vec<f64>> = self
            .weights
            .iter()
            .map(|&w| {
                let mut row = vec![1.0; j + 1];
                for t in 1..=j {
                    row[t] = row[t - 1] * w / t as f64;
                }
                row
            })
            .collect();
        let jfact: f64 = (1..=j).map(|i| i as f64).product();
        compositions(j, n)
            .map(|parts| {
                let mut coef = jfact;
                let mut mu = 0.0;
                for (i, &t) in parts.iter().enumerate() {
                    if t > 0 {
                        coef *= table[i][t];
                        mu += t as f64 / self.means[i];
                    }
                }
                (coef, mu)
            })
            .collect()
    }
}

/// `E[ln(1 + a X_(k:K))]` for every rank and requested slope, from the mixture.
struct RfOrderExpectations {
    /// `terms[j-1]` expands `S^j`.
    terms: Vec<Vec<(f64, f64)>>,
    users: usize,
}

impl RfOrderExpectations {
    fn new(mix: &ChebyshevMixture, users: usize) -> Self {
        RfOrderExpectations {
            terms: (1..=users).map(|j| mix.power_terms(j)).collect(),
            users,
        }
    }

    /// `E[ln(1 + a min of j)] = Σ c e^(mu/a) E1(mu/a)`.
    fn min_of(&self, j: usize, a: f64) -> Result<f64> {
        let mut acc = 0.0;
        for &(c, mu) in &self.terms[j - 1] {
            acc += c * exp_e1_scaled(mu / a)?;
        }
        Ok(acc)
    }

    fn rank(&self, k: usize, a: f64) -> Result<f64> {
        if a == 0.0 {
            return Ok(0.0);
        }
        let users = self.users;
        let mins = (1..=users).map(|j| self.min_of(j, a)).collect::<Result<Vec<_>>>()?;
        // Max of q draws via inclusion-exclusion over minima.
        let max_of = |q: usize| -> f64 {
            -(1..=q)
                .map(|j| binom(q as i64, j as i64) * if j % 2 == 0 { 1.0 } else { -1.0 } * mins[j - 1])
                .sum::<f64>()
        };
        let mut acc = 0.0;
        for r in 0..=(users - k) {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            acc += binom((users - k) as i64, r as i64) * sign / (r + k) as f64 * max_of(r + k);
        }
        Ok(k as f64 * binom(users as i64, k as i64) * acc)
    }
}

pub fn analytic_noma_rf_sum_rate(cfg: &RfApConfig, alloc: &NomaAllocation, sigma_sq: f64) -> Result<RateEstimate> {
    analytic_noma_rf_sum_rate_with(cfg, alloc, sigma_sq, StrongestUserSinr::Consistent)
}

pub fn analytic_noma_rf_sum_rate_with(
    cfg: &RfApConfig,
    alloc: &NomaAllocation,
    sigma_sq: f64,
    form: StrongestUserSinr,
) -> Result<RateEstimate> {
    let rho = cfg.snr();
    check_link(rho, sigma_sq)?;
    let mix = ChebyshevMixture::new(cfg, sigma_sq)?;
    let users = alloc.users();
    let ex = RfOrderExpectations::new(&mix, users);
    let c = 1.0 / rho + sigma_sq;
    let per_user = (1..=users)
        .map(|k| {
            if k < users {
                Ok((ex.rank(k, alloc.tail_from(k) / c)? - ex.rank(k, alloc.tail_after(k) / c)?) / LN2)
            } else {
                match form {
                    StrongestUserSinr::Consistent => Ok(ex.rank(k, alloc.power(k) / c)? / LN2),
                    StrongestUserSinr::AsPrinted => {
                        let z = rho * alloc.power(k) / (1.0 + sigma_sq);
                        Ok((sigma_sq.ln_1p() + ex.rank(k, z)?) / LN2)
                    }
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateEstimate::analytic(per_user))
}
