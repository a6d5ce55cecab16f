//! Monte Carlo estimates of the average sum rates.
//!
//! Trials are split into batches of `batch` trials; batch `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` on stream `b`. Batches run in parallel and
//! their statistics are merged in index order, so the result depends only on
//! `(seed, trials, batch)` and not on the number of threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::channel::{complex_normal_power, los_gain_unchecked, sample_radius, RfApConfig, VlcApConfig};
use crate::error::{Error, Result};
use crate::rate::{noma_user_rate, ofdma_vlc_user_rate, Method, NomaAllocation, OfdmaAllocation, RateEstimate, StrongestUserSinr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub batch: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            trials: 100_000,
            seed: 0,
            batch: 10_000,
        }
    }
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.batch == 0 {
            return Err(Error::domain("McConfig", "trials and batch must be at least 1"));
        }
        Ok(())
    }
}

/// How the true gain, its estimate and the error are drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ErrorRealization {
    /// The estimate follows the physical channel law; the error is drawn
    /// independently and `h = h_hat + e`.
    #[default]
    EstimateFromGeometry,
    /// The true gain follows the physical channel law and `h_hat = h - e`.
    TrueFromGeometry,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SortKey {
    #[default]
    Estimated,
    True,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct McOptions {
    pub realization: ErrorRealization,
    pub sort_key: SortKey,
    pub strongest: StrongestUserSinr,
}

/// One trial: per-user true and estimated (squared) gains in rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub true_gain: Vec<f64>,
    pub estimated_gain: Vec<f64>,
}

impl Trial {
    fn sort(&mut self, key: SortKey) {
        let mut idx: Vec<usize> = (0..self.true_gain.len()).collect();
        let by: &[f64] = match key {
            SortKey::Estimated => &self.estimated_gain,
            SortKey::True => &self.true_gain,
        };
        let score: Vec<f64> = by.iter().map(|g| g * g).collect();
        idx.sort_by(|&a, &b| score[a].total_cmp(&score[b]));
        self.true_gain = idx.iter().map(|&i| self.true_gain[i]).collect();
        self.estimated_gain = idx.iter().map(|&i| self.estimated_gain[i]).collect();
    }

    pub fn estimated_sq(&self) -> impl Iterator<Item = f64> + '_ {
        self.estimated_gain.iter().map(|g| g * g)
    }
}

/// Draws VLC amplitudes `h` and `h_hat` for `users` users, sorted ascending.
pub struct VlcSampler {
    xi: f64,
    m: f64,
    height: f64,
    cell_radius: f64,
    error: Option<Normal<f64>>,
    users: usize,
    opts: McOptions,
}

impl VlcSampler {
    pub fn new(cfg: &VlcApConfig, users: usize, sigma_sq: f64, opts: McOptions) -> Result<Self> {
        cfg.validate()?;
        if !(sigma_sq >= 0.0 && sigma_sq.is_finite()) {
            return Err(Error::domain("VlcSampler", format!("error variance {sigma_sq} must be >= 0")));
        }
        let error = if sigma_sq > 0.0 {
            Some(Normal::new(0.0, sigma_sq.sqrt()).map_err(|e| Error::domain("VlcSampler", e.to_string()))?)
        } else {
            None
        };
        Ok(VlcSampler {
            xi: cfg.xi(),
            m: cfg.lambertian_order()?,
            height: cfg.height,
            cell_radius: cfg.cell_radius,
            error,
            users,
            opts,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Trial {
        let mut true_gain = Vec::with_capacity(self.users);
        let mut estimated_gain = Vec::with_capacity(self.users);
        for _ in 0..self.users {
            let g = los_gain_unchecked(self.xi, self.m, self.height, sample_radius(self.cell_radius, rng));
            let e = self.error.map_or(0.0, |n| n.sample(rng));
            match self.opts.realization {
                ErrorRealization::EstimateFromGeometry => {
                    estimated_gain.push(g);
                    true_gain.push(g + e);
                }
                ErrorRealization::TrueFromGeometry => {
                    true_gain.push(g);
                    estimated_gain.push(g - e);
                }
            }
        }
        let mut t = Trial {
            true_gain,
            estimated_gain,
        };
        t.sort(self.opts.sort_key);
        t
    }
}

/// Draws RF complex gains, reported as magnitudes `|h|` and `|h_hat|`.
pub struct RfSampler {
    path_loss_exp: f64,
    cell_radius: f64,
    sigma_sq: f64,
    users: usize,
    opts: McOptions,
}

impl RfSampler {
    pub fn new(cfg: &RfApConfig, users: usize, sigma_sq: f64, opts: McOptions) -> Result<Self> {
        cfg.validate()?;
        if !(sigma_sq >= 0.0 && sigma_sq.is_finite()) {
            return Err(Error::domain("RfSampler", format!("error variance {sigma_sq} must be >= 0")));
        }
        if opts.realization == ErrorRealization::EstimateFromGeometry && sigma_sq >= cfg.edge_path_gain() {
            return Err(Error::domain(
                "RfSampler",
                format!(
                    "error variance {sigma_sq:e} must stay below the cell-edge path gain {:e}",
                    cfg.edge_path_gain()
                ),
            ));
        }
        Ok(RfSampler {
            path_loss_exp: cfg.path_loss_exp,
            cell_radius: cfg.cell_radius,
            sigma_sq,
            users,
            opts,
        })
    }

    fn complex<R: Rng + ?Sized>(var: f64, rng: &mut R) -> (f64, f64) {
        let s = (0.5 * var).sqrt();
        let n = rand_distr::StandardNormal;
        let re: f64 = rng.sample(n);
        let im: f64 = rng.sample(n);
        (s * re, s * im)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Trial {
        let mut true_gain = Vec::with_capacity(self.users);
        let mut estimated_gain = Vec::with_capacity(self.users);
        for _ in 0..self.users {
            let d = sample_radius(self.cell_radius, rng);
            let path_gain = d.powf(-self.path_loss_exp);
            match self.opts.realization {
                ErrorRealization::EstimateFromGeometry => {
                    let (hr, hi) = Self::complex(path_gain - self.sigma_sq, rng);
                    let (er, ei) = Self::complex(self.sigma_sq, rng);
                    estimated_gain.push(hr.hypot(hi));
                    true_gain.push((hr + er).hypot(hi + ei));
                }
                ErrorRealization::TrueFromGeometry => {
                    let (hr, hi) = Self::complex(path_gain, rng);
                    let (er, ei) = Self::complex(self.sigma_sq, rng);
                    true_gain.push(hr.hypot(hi));
                    estimated_gain.push((hr - er).hypot(hi - ei));
                }
            }
        }
        let mut t = Trial {
            true_gain,
            estimated_gain,
        };
        t.sort(self.opts.sort_key);
        t
    }
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }
}

#[derive(Debug, Clone)]
struct BatchStats {
    sum: Moments,
    per_user: Vec<f64>,
}

/// Runs `per_trial` over all trials and averages the per-user rates it writes.
fn run<F>(mc: &McConfig, users: usize, per_trial: F) -> Result<RateEstimate>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    mc.validate()?;
    let batches = mc.trials.div_ceil(mc.batch);
    let stats: Vec<BatchStats> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(b);
            let n = mc.batch.min(mc.trials - b * mc.batch);
            let mut rates = vec![0.0; users];
            let mut acc = BatchStats {
                sum: Moments::default(),
                per_user: vec![0.0; users],
            };
            for _ in 0..n {
                per_trial(&mut rng, &mut rates);
                let mut s = 0.0;
                for (a, r) in acc.per_user.iter_mut().zip(&rates) {
                    *a += r;
                    s += r;
                }
                acc.sum.push(s);
            }
            acc
        })
        .collect();

    let mut total = Moments::default();
    let mut per_user = vec![0.0; users];
    for s in &stats {
        total.merge(&s.sum);
        for (a, v) in per_user.iter_mut().zip(&s.per_user) {
            *a += v;
        }
    }
    let n = mc.trials as f64;
    per_user.iter_mut().for_each(|v| *v /= n);
    let std_error = if mc.trials > 1 {
        (total.m2 / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(RateEstimate {
        sum_rate: per_user.iter().sum(),
        per_user,
        method: Method::MonteCarlo,
        std_error,
        trials: mc.trials,
    })
}

pub fn mc_noma_vlc_sum_rate(
    cfg: &VlcApConfig,
    alloc: &NomaAllocation,
    rho: f64,
    sigma_sq: f64,
    mc: &McConfig,
) -> Result<RateEstimate> {
    mc_noma_vlc_sum_rate_with(cfg, alloc, rho, sigma_sq, mc, McOptions::default())
}

pub fn mc_noma_vlc_sum_rate_with(
    cfg: &VlcApConfig,
    alloc: &NomaAllocation,
    rho: f64,
    sigma_sq: f64,
    mc: &McConfig,
    opts: McOptions,
) -> Result<RateEstimate> {
    let users = alloc.users();
    let sampler = VlcSampler::new(cfg, users, sigma_sq, opts)?;
    run(mc, users, |rng, out| {
        let t = sampler.sample(rng);
        for (k, (h2, r)) in t.estimated_sq().zip(out.iter_mut()).enumerate() {
            *r = noma_user_rate(h2, k + 1, alloc, rho, sigma_sq, opts.strongest);
        }
    })
}

pub fn mc_ofdma_vlc_sum_rate(
    cfg: &VlcApConfig,
    alloc: &OfdmaAllocation,
    rho: f64,
    sigma_sq: f64,
    mc: &McConfig,
) -> Result<RateEstimate> {
    mc_ofdma_vlc_sum_rate_with(cfg, alloc, rho, sigma_sq, mc, McOptions::default())
}

pub fn mc_ofdma_vlc_sum_rate_with(
    cfg: &VlcApConfig,
    alloc: &OfdmaAllocation,
    rho: f64,
    sigma_sq: f64,
    mc: &McConfig,
    opts: McOptions,
) -> Result<RateEstimate> {
    let users = alloc.users();
    let sampler = VlcSampler::new(cfg, users, sigma_sq, opts)?;
    run(mc, users, |rng, out| {
        let t = sampler.sample(rng);
        for (k, (h2, r)) in t.estimated_sq().zip(out.iter_mut()).enumerate() {
            *r = ofdma_vlc_user_rate(h2, k + 1, alloc, rho, sigma_sq);
        }
    })
}

pub fn mc_noma_rf_sum_rate(cfg: &RfApConfig, alloc: &NomaAllocation, sigma_sq: f64, mc: &McConfig) -> Result<RateEstimate> {
    mc_noma_rf_sum_rate_with(cfg, alloc, sigma_sq, mc, McOptions::default())
}

pub fn mc_noma_rf_sum_rate_with(
    cfg: &RfApConfig,
    alloc: &NomaAllocation,
    sigma_sq: f64,
    mc: &McConfig,
    opts: McOptions,
) -> Result<RateEstimate> {
    let users = alloc.users();
    let sampler = RfSampler::new(cfg, users, sigma_sq, opts)?;
    let rho = cfg.snr();
    run(mc, users, |rng, out| {
        let t = sampler.sample(rng);
        for (k, (x, r)) in t.estimated_sq().zip(out.iter_mut()).enumerate() {
            *r = noma_user_rate(x, k + 1, alloc, rho, sigma_sq, opts.strongest);
        }
    })
}

/// Unit-power Rayleigh draw, exposed for oracles that need `|H|^2` directly.
pub fn rayleigh_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    complex_normal_power(rng)
}
