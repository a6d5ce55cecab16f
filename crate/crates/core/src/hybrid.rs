//! Hybrid VLC-RF throughput and energy efficiency.

use crate::error::{Error, Result};
use crate::rate::RateEstimate;

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    /// LOS availability on the VLC link.
    pub beta_vlc: f64,
    pub beta_rf: f64,
    pub bandwidth_vlc: f64,
    pub bandwidth_rf: f64,
    /// Fixed circuit power of the VLC access point, W.
    pub q_vlc: f64,
    pub q_rf: f64,
    /// Per-user RF transmit powers, W.
    pub p_rf_users: Vec<f64>,
}

pub const DEFAULT_TOTAL_RF_USER_POWER: f64 = 0.7;

impl Default for HybridConfig {
    fn default() -> Self {
        Self::with_users(4)
    }
}

impl HybridConfig {
    /// Reference powers with the RF transmit budget split equally over `users`.
    pub fn with_users(users: usize) -> Self {
        let users = users.max(1);
        HybridConfig {
            beta_vlc: 0.5,
            beta_rf: 0.5,
            bandwidth_vlc: 20e6,
            bandwidth_rf: 20e6,
            q_vlc: 4.0,
            q_rf: 6.7,
            p_rf_users: vec![DEFAULT_TOTAL_RF_USER_POWER / users as f64; users],
        }
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "HybridConfig";
        for (name, b) in [("beta_vlc", self.beta_vlc), ("beta_rf", self.beta_rf)] {
            if !(0.0..=1.0).contains(&b) {
                return Err(Error::domain(OP, format!("{name} = {b} not in [0, 1]")));
            }
        }
        for (name, v) in [("bandwidth_vlc", self.bandwidth_vlc), ("bandwidth_rf", self.bandwidth_rf)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(OP, format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("q_vlc", self.q_vlc), ("q_rf", self.q_rf)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(OP, format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.p_rf_users.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::domain(OP, "RF user powers must be non-negative"));
        }
        Ok(())
    }

    pub fn total_power(&self) -> f64 {
        self.q_vlc + self.q_rf + self.p_rf_users.iter().sum::<f64>()
    }
}

/// A scaled quantity with its Monte Carlo standard error (0 when deterministic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub std_error: f64,
}

/// `B_RF beta_RF R_RF + B_VLC beta_VLC R_VLC`, bits/s.
pub fn hybrid_sum_rate(h: &HybridConfig, r_vlc: &RateEstimate, r_rf: &RateEstimate) -> Result<Measured> {
    h.validate()?;
    if r_vlc.sum_rate < 0.0 || r_rf.sum_rate < 0.0 {
        return Err(Error::domain("hybrid_sum_rate", "rates must be non-negative"));
    }
    let cv = h.bandwidth_vlc * h.beta_vlc;
    let cr = h.bandwidth_rf * h.beta_rf;
    Ok(Measured {
        value: cr * r_rf.sum_rate + cv * r_vlc.sum_rate,
        std_error: (cr * r_rf.std_error).hypot(cv * r_vlc.std_error),
    })
}

/// Bits per joule over the whole hybrid power budget.
pub fn energy_efficiency(h: &HybridConfig, r_sum: Measured) -> Result<Measured> {
    let denom = h.total_power();
    if !(denom > 0.0) {
        return Err(Error::domain("energy_efficiency", "total consumed power must be positive"));
    }
    Ok(Measured {
        value: r_sum.value / denom,
        std_error: r_sum.std_error / denom,
    })
}

/// `B_VLC beta_VLC R_VLC / Q_VLC`; the standalone scheme pays for no RF hardware.
pub fn vlc_only_energy_efficiency(h: &HybridConfig, r_vlc: &RateEstimate) -> Result<Measured> {
    if !(h.q_vlc > 0.0) {
        return Err(Error::domain("vlc_only_energy_efficiency", "Q_VLC must be positive"));
    }
    let c = h.bandwidth_vlc * h.beta_vlc / h.q_vlc;
    Ok(Measured {
        value: c * r_vlc.sum_rate,
        std_error: c * r_vlc.std_error,
    })
}
