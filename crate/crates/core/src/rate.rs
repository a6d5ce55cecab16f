//! Power allocations, per-user rate formulas and the rate result type.

use crate::error::{Error, Result};

/// NOMA amplitude coefficients `alpha_1 >= ... >= alpha_K > 0`, `Σ alpha^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NomaAllocation {
    coefficients: Vec<f64>,
    /// `tail[k] = Σ_{i>=k} alpha_i^2` (0-based), with a trailing 0.
    tail: Vec<f64>,
}

pub const DEFAULT_GEOMETRIC_RATIO: f64 = 0.4;

impl NomaAllocation {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        const OP: &str = "NomaAllocation";
        if coefficients.is_empty() {
            return Err(Error::domain(OP, "at least one coefficient is required"));
        }
        if coefficients.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::domain(OP, "coefficients must be positive and finite"));
        }
        if coefficients.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::domain(OP, "coefficients must be non-increasing with rank"));
        }
        let total: f64 = coefficients.iter().map(|a| a * a).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(OP, format!("squared coefficients sum to {total}, not 1")));
        }
        Ok(Self::from_valid(coefficients))
    }

    /// Power shares `alpha_k^2 ∝ mu^(k-1)`, normalized to one.
    pub fn geometric(users: usize, ratio: f64) -> Result<Self> {
        if users == 0 {
            return Err(Error::domain("NomaAllocation", "at least one user is required"));
        }
        if !(ratio > 0.0 && ratio <= 1.0) {
            return Err(Error::domain("NomaAllocation", format!("ratio {ratio} not in (0, 1]")));
        }
        let raw: Vec<f64> = (0..users).map(|k| ratio.powi(k as i32)).collect();
        let norm: f64 = raw.iter().sum();
        let coefficients = raw.iter().map(|w| (w / norm).sqrt()).collect();
        Ok(Self::from_valid(coefficients))
    }

    pub fn default_for(users: usize) -> Result<Self> {
        Self::geometric(users, DEFAULT_GEOMETRIC_RATIO)
    }

    fn from_valid(coefficients: Vec<f64>) -> Self {
        let mut tail = vec![0.0; coefficients.len() + 1];
        for k in (0..coefficients.len()).rev() {
            tail[k] = tail[k + 1] + coefficients[k] * coefficients[k];
        }
        NomaAllocation { coefficients, tail }
    }

    pub fn users(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `alpha_k^2` for 1-based rank `k`.
    pub fn power(&self, k: usize) -> f64 {
        let a = self.coefficients[k - 1];
        a * a
    }

    /// `Σ_{i>=k} alpha_i^2` for 1-based `k`.
    pub fn tail_from(&self, k: usize) -> f64 {
        self.tail[k - 1]
    }

    /// `Σ_{i>k} alpha_i^2` for 1-based `k`.
    pub fn tail_after(&self, k: usize) -> f64 {
        self.tail[k]
    }
}

/// OFDMA bandwidth shares `w_k` and power shares `b_k`, each summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmaAllocation {
    pub bandwidth_fractions: Vec<f64>,
    pub power_fractions: Vec<f64>,
}

impl OfdmaAllocation {
    pub fn new(bandwidth_fractions: Vec<f64>, power_fractions: Vec<f64>) -> Result<Self> {
        const OP: &str = "OfdmaAllocation";
        if bandwidth_fractions.is_empty() || bandwidth_fractions.len() != power_fractions.len() {
            return Err(Error::domain(OP, "fraction lists must be non-empty and of equal length"));
        }
        for (name, v) in [("bandwidth", &bandwidth_fractions), ("power", &power_fractions)] {
            if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::domain(OP, format!("{name} fractions must be positive")));
            }
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::domain(OP, format!("{name} fractions sum to {s}, not 1")));
            }
        }
        Ok(OfdmaAllocation {
            bandwidth_fractions,
            power_fractions,
        })
    }

    pub fn equal(users: usize) -> Result<Self> {
        if users == 0 {
            return Err(Error::domain("OfdmaAllocation", "at least one user is required"));
        }
        let share = 1.0 / users as f64;
        Ok(OfdmaAllocation {
            bandwidth_fractions: vec![share; users],
            power_fractions: vec![share; users],
        })
    }

    pub fn users(&self) -> usize {
        self.bandwidth_fractions.len()
    }
}

/// How the strongest user's SINR treats the estimation error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum StrongestUserSinr {
    /// `t alpha_K^2 / (1/rho + sigma^2)`: the error acts as extra noise, as for every other user.
    #[default]
    Consistent,
    /// `rho t alpha_K^2 + sigma^2`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "mc",
        }
    }
}

/// Average rates in bits per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub sum_rate: f64,
    pub per_user: Vec<f64>,
    pub method: Method,
    /// Standard error of `sum_rate`; zero for analytic results.
    pub std_error: f64,
    pub trials: u64,
}

impl RateEstimate {
    pub fn analytic(per_user: Vec<f64>) -> Self {
        RateEstimate {
            sum_rate: per_user.iter().sum(),
            per_user,
            method: Method::Analytic,
            std_error: 0.0,
            trials: 0,
        }
    }
}

/// Rate of the rank-`k` NOMA user from the estimated squared gain `h2`.
pub fn noma_vlc_user_rate(h2: f64, k: usize, alloc: &NomaAllocation, rho: f64, sigma_sq: f64) -> f64 {
    noma_user_rate(h2, k, alloc, rho, sigma_sq, StrongestUserSinr::Consistent)
}

/// [`noma_vlc_user_rate`] with an explicit strongest-user form.
pub fn noma_user_rate(h2: f64, k: usize, alloc: &NomaAllocation, rho: f64, sigma_sq: f64, form: StrongestUserSinr) -> f64 {
    let users = alloc.users();
    debug_assert!(k >= 1 && k <= users);
    let noise = 1.0 / rho + sigma_sq;
    if k < users {
        let sinr = h2 * alloc.power(k) / (h2 * alloc.tail_after(k) + noise);
        sinr.ln_1p() / std::f64::consts::LN_2
    } else {
        match form {
            StrongestUserSinr::Consistent => (h2 * alloc.power(k) / noise).ln_1p() / std::f64::consts::LN_2,
            StrongestUserSinr::AsPrinted => (rho * h2 * alloc.power(k) + sigma_sq).ln_1p() / std::f64::consts::LN_2,
        }
    }
}

/// Rate of the rank-`k` NOMA RF user; `x = |h_hat|^2`, `rho = P / sigma_z^2`.
///
/// The estimation error enters as interference of power `P sigma^2` spread over
/// the whole superposed signal, which makes the form identical to the VLC one.
pub fn rf_user_rate(x: f64, k: usize, alloc: &NomaAllocation, rho: f64, sigma_sq: f64, form: StrongestUserSinr) -> f64 {
    noma_user_rate(x, k, alloc, rho, sigma_sq, form)
}

/// OFDMA user `k`: `(1/2) w_k log2(1 + rho w_k t / (b_k (1 + rho sigma^2)))`.
pub fn ofdma_vlc_user_rate(t: f64, k: usize, alloc: &OfdmaAllocation, rho: f64, sigma_sq: f64) -> f64 {
    let w = alloc.bandwidth_fractions[k - 1];
    let b = alloc.power_fractions[k - 1];
    0.5 * w * (rho * w * t / (b * (1.0 + rho * sigma_sq))).ln_1p() / std::f64::consts::LN_2
}
