//! Analytic-versus-Monte-Carlo battery run by the `selftest` subcommand.

use std::io::Write;

use crate::analytic::{analytic_noma_rf_sum_rate, analytic_noma_vlc_sum_rate, analytic_ofdma_vlc_sum_rate};
use crate::channel::{RfApConfig, VlcApConfig};
use crate::error::{Error, Result};
use crate::mc::{mc_noma_rf_sum_rate, mc_noma_vlc_sum_rate, mc_ofdma_vlc_sum_rate, McConfig};
use crate::rate::{NomaAllocation, OfdmaAllocation, RateEstimate};

/// Allowed analytic-to-MC distance, in MC standard errors.
pub const SIGMA_BAND: f64 = 3.0;

pub struct Check {
    pub name: String,
    pub analytic: f64,
    pub mc: RateEstimate,
}

impl Check {
    pub fn z(&self) -> f64 {
        (self.analytic - self.mc.sum_rate).abs() / self.mc.std_error.max(f64::MIN_POSITIVE)
    }

    pub fn passed(&self) -> bool {
        self.z() <= SIGMA_BAND
    }
}

pub fn battery(trials: u64, seed: u64) -> Result<Vec<Check>> {
    let mc = McConfig::new(trials, seed);
    let vlc = VlcApConfig::default();
    let rf = RfApConfig {
        chebyshev_order: 40,
        ..Default::default()
    };
    let mut out = Vec::new();
    for (users, rho_db, sigma_db) in [(1, 140.0, None), (3, 150.0, Some(-125.0)), (5, 180.0, Some(-120.0))] {
        let alloc = NomaAllocation::default_for(users)?;
        let rho = crate::db_to_linear(rho_db);
        let s = sigma_db.map_or(0.0, crate::db_to_linear);
        out.push(Check {
            name: format!("noma-vlc K={users} rho={rho_db}dB"),
            analytic: analytic_noma_vlc_sum_rate(&vlc, &alloc, rho, s)?.sum_rate,
            mc: mc_noma_vlc_sum_rate(&vlc, &alloc, rho, s, &mc)?,
        });
        let o = OfdmaAllocation::equal(users)?;
        out.push(Check {
            name: format!("ofdma-vlc K={users} rho={rho_db}dB"),
            analytic: analytic_ofdma_vlc_sum_rate(&vlc, &o, rho, s)?.sum_rate,
            mc: mc_ofdma_vlc_sum_rate(&vlc, &o, rho, s, &mc)?,
        });
    }
    for (users, rel) in [(1, 0.0), (3, 0.1)] {
        let alloc = NomaAllocation::default_for(users)?;
        let s = rel * rf.edge_path_gain();
        out.push(Check {
            name: format!("noma-rf K={users} sigma={rel}xD^-PL"),
            analytic: analytic_noma_rf_sum_rate(&rf, &alloc, s)?.sum_rate,
            mc: mc_noma_rf_sum_rate(&rf, &alloc, s, &mc)?,
        });
    }
    Ok(out)
}

/// Prints one line per check; fails with an accuracy error if any check misses.
pub fn run<W: Write>(out: &mut W, trials: u64, seed: u64) -> Result<()> {
    let checks = battery(trials, seed)?;
    let mut worst: f64 = 0.0;
    for c in &checks {
        writeln!(
            out,
            "{} {:<32} analytic {:.6} mc {:.6} +- {:.6} ({:.2} se)",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.analytic,
            c.mc.sum_rate,
            c.mc.std_error,
            c.z()
        )?;
        worst = worst.max(c.z());
    }
    if checks.iter().all(Check::passed) {
        Ok(())
    } else {
        Err(Error::Accuracy {
            achieved: worst,
            requested: SIGMA_BAND,
        })
    }
}
