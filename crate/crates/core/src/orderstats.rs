//! Distribution of the squared VLC gain for users uniform on the cell disc.
//!
//! With `C = Xi (m+1) L^(m+1)` and `p = 1/(m+3)`, inverting the radial gain map
//! gives `r(t)^2 + L^2 = s(t) = C^(2p) t^(-p)`. Since the radius has density
//! `2r / r_e^2` and the gain decreases in `r`, small gains come from large radii:
//!
//! ```text
//! F(t) = P[r >= r(t)] = (r_e^2 + L^2 - s(t)) / r_e^2
//! f(t) = p Omega t^(-p-1),        Omega = C^(2p) / r_e^2
//! ```
//!
//! Rank `k = 1` is the weakest of `K` users; the `k`-th order statistic has
//! density `k C(K,k) f F^(k-1) (1-F)^(K-k)`.

use crate::channel::VlcApConfig;
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};
use crate::specialfn::binom;

/// Relative tolerance of [`GainSqDistribution::expect_over_ordered`].
pub const EXPECTATION_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSqDistribution {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Lambertian order.
    pub m: f64,
    /// `Xi (m+1) L^(m+1)`.
    pub gain_const: f64,
    pub height: f64,
    pub cell_radius: f64,
}

impl GainSqDistribution {
    pub fn new(cfg: &VlcApConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.lambertian_order()?;
        let gain_const = cfg.xi() * (m + 1.0) * cfg.height.powf(m + 1.0);
        let (lambda_min, lambda_max) = crate::channel::gain_sq_bounds(cfg)?;
        Ok(GainSqDistribution {
            lambda_min,
            lambda_max,
            m,
            gain_const,
            height: cfg.height,
            cell_radius: cfg.cell_radius,
        })
    }

    /// `1 / (m + 3)`.
    pub fn p(&self) -> f64 {
        1.0 / (self.m + 3.0)
    }

    /// `C^(2/(m+3)) / r_e^2`.
    pub fn omega(&self) -> f64 {
        self.gain_const.powf(2.0 * self.p()) / (self.cell_radius * self.cell_radius)
    }

    fn in_support(&self, t: f64) -> bool {
        t >= self.lambda_min && t <= self.lambda_max
    }

    /// `r(t)^2 + L^2`.
    fn s(&self, t: f64) -> f64 {
        self.gain_const.powf(2.0 * self.p()) * t.powf(-self.p())
    }

    /// Radial distance whose squared gain is `t`.
    pub fn radius_for(&self, t: f64) -> f64 {
        (self.s(t) - self.height * self.height).max(0.0).sqrt()
    }

    pub fn pdf(&self, t: f64) -> f64 {
        if !self.in_support(t) {
            return 0.0;
        }
        let p = self.p();
        p * self.omega() * t.powf(-p - 1.0)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= self.lambda_min {
            return 0.0;
        }
        if t >= self.lambda_max {
            return 1.0;
        }
        let re2 = self.cell_radius * self.cell_radius;
        ((re2 + self.height * self.height - self.s(t)) / re2).clamp(0.0, 1.0)
    }

    /// `1 - F(t)`, computed directly to keep precision near `lambda_min`.
    pub fn survival(&self, t: f64) -> f64 {
        if t <= self.lambda_min {
            return 1.0;
        }
        if t >= self.lambda_max {
            return 0.0;
        }
        let re2 = self.cell_radius * self.cell_radius;
        ((self.s(t) - self.height * self.height) / re2).clamp(0.0, 1.0)
    }

    /// Inverse CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let re2 = self.cell_radius * self.cell_radius;
        let s = re2 * (1.0 - u) + self.height * self.height;
        let t = (self.gain_const.powf(2.0 * self.p()) / s).powf(self.m + 3.0);
        t.clamp(self.lambda_min, self.lambda_max)
    }

    pub fn ordered_pdf(&self, k: usize, users: usize, t: f64) -> Result<f64> {
        check_rank(k, users)?;
        if !self.in_support(t) {
            return Ok(0.0);
        }
        Ok(ordered_weight(k, users, self.cdf(t), self.survival(t)) * self.pdf(t))
    }

    /// `E[g(t)]` under the rank-`k` density, integrated over `u = ln t`.
    pub fn expect_over_ordered<G: FnMut(f64) -> f64>(&self, k: usize, users: usize, mut g: G) -> Result<f64> {
        check_rank(k, users)?;
        if self.lambda_max == self.lambda_min {
            return Ok(g(self.lambda_max));
        }
        let p = self.p();
        let omega = self.omega();
        let integrand = |u: f64| {
            let t = u.exp();
            let w = ordered_weight(k, users, self.cdf(t), self.survival(t));
            // f(t) t = p Omega t^-p
            g(t) * w * p * omega * (-p * u).exp()
        };
        let tol = Tolerance::relative(EXPECTATION_REL_TOL);
        Ok(integrate(integrand, self.lambda_min.ln(), self.lambda_max.ln(), tol)?.value)
    }

    /// `E[g(t)]` under the unordered density.
    pub fn expect<G: FnMut(f64) -> f64>(&self, g: G) -> Result<f64> {
        self.expect_over_ordered(1, 1, g)
    }
}

/// `k C(K,k) F^(k-1) (1-F)^(K-k)`.
fn ordered_weight(k: usize, users: usize, f: f64, sf: f64) -> f64 {
    k as f64 * binom(users as i64, k as i64) * f.powi(k as i32 - 1) * sf.powi((users - k) as i32)
}

pub(crate) fn check_rank(k: usize, users: usize) -> Result<()> {
    if users == 0 || k == 0 || k > users {
        return Err(Error::domain("rank", format!("rank {k} not in 1..={users}")));
    }
    Ok(())
}

pub fn gain_sq_pdf(dist: &GainSqDistribution, t: f64) -> f64 {
    dist.pdf(t)
}

pub fn gain_sq_cdf(dist: &GainSqDistribution, t: f64) -> f64 {
    dist.cdf(t)
}

pub fn ordered_gain_sq_pdf(dist: &GainSqDistribution, k: usize, users: usize, t: f64) -> Result<f64> {
    dist.ordered_pdf(k, users, t)
}

pub fn expect_over_ordered<G: FnMut(f64) -> f64>(dist: &GainSqDistribution, k: usize, users: usize, g: G) -> Result<f64> {
    dist.expect_over_ordered(k, users, g)
}
