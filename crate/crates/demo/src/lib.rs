//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export returns a flat `Float64Array`; curves are laid out one after
//! another, each with `steps` points. Errors surface as JS exceptions.

use hybrid_noma::analytic::{analytic_noma_rf_sum_rate, analytic_noma_vlc_sum_rate, analytic_ofdma_vlc_sum_rate};
use hybrid_noma::channel::{RfApConfig, VlcApConfig};
use hybrid_noma::hybrid::{energy_efficiency, hybrid_sum_rate, vlc_only_energy_efficiency, HybridConfig};
use hybrid_noma::rate::{NomaAllocation, OfdmaAllocation};
use hybrid_noma::{db_to_linear, Error};
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, Error>;

fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(from < to) {
        return Err(Error::Usage(format!("need from < to and at least 2 steps, got [{from}, {to}] x {steps}")));
    }
    Ok((0..steps)
        .map(|i| if i + 1 == steps { to } else { from + (to - from) * i as f64 / (steps - 1) as f64 })
        .collect())
}

/// `-inf` dB and below -400 dB both mean perfect CSI.
fn variance(db: f64) -> f64 {
    if db < -400.0 {
        0.0
    } else {
        db_to_linear(db)
    }
}

/// NOMA-VLC sum rate (bpcu) over the LED semi-angle.
pub fn semi_angle_curve(users: usize, rho_db: f64, sigma_db: f64, from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    let alloc = NomaAllocation::default_for(users)?;
    grid(from, to, steps)?
        .into_iter()
        .map(|deg| {
            let cfg = VlcApConfig {
                semi_angle_deg: deg,
                ..Default::default()
            };
            Ok(analytic_noma_vlc_sum_rate(&cfg, &alloc, db_to_linear(rho_db), variance(sigma_db))?.sum_rate)
        })
        .collect()
}

/// NOMA then OFDMA VLC sum rates (bpcu) over the transmit SNR.
pub fn snr_curves(users: usize, sigma_db: f64, from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    let cfg = VlcApConfig::default();
    let noma = NomaAllocation::default_for(users)?;
    let ofdma = OfdmaAllocation::equal(users)?;
    let s = variance(sigma_db);
    let xs = grid(from, to, steps)?;
    let mut out = Vec::with_capacity(2 * steps);
    for &x in &xs {
        out.push(analytic_noma_vlc_sum_rate(&cfg, &noma, db_to_linear(x), s)?.sum_rate);
    }
    for &x in &xs {
        out.push(analytic_ofdma_vlc_sum_rate(&cfg, &ofdma, db_to_linear(x), s)?.sum_rate);
    }
    Ok(out)
}

/// Hybrid then VLC-only energy efficiency (bit/J) over the VLC LOS probability.
///
/// `rf_sigma_rel` is the RF error variance as a fraction of the cell-edge path
/// gain. With `joint` the RF LOS probability follows the VLC one, otherwise it
/// stays at 1.
pub fn los_curves(users: usize, rho_db: f64, sigma_db: f64, rf_sigma_rel: f64, joint: bool, steps: usize) -> Result<Vec<f64>> {
    let vlc = VlcApConfig::default();
    let rf = RfApConfig::default();
    let alloc = NomaAllocation::default_for(users)?;
    let r_vlc = analytic_noma_vlc_sum_rate(&vlc, &alloc, db_to_linear(rho_db), variance(sigma_db))?;
    let r_rf = analytic_noma_rf_sum_rate(&rf, &alloc, rf_sigma_rel * rf.edge_path_gain())?;
    let xs = grid(0.0, 1.0, steps)?;
    let mut hybrid = Vec::with_capacity(steps);
    let mut solo = Vec::with_capacity(steps);
    for beta in xs {
        let h = HybridConfig {
            beta_vlc: beta,
            beta_rf: if joint { beta } else { 1.0 },
            ..HybridConfig::with_users(users)
        };
        hybrid.push(energy_efficiency(&h, hybrid_sum_rate(&h, &r_vlc, &r_rf)?)?.value);
        solo.push(vlc_only_energy_efficiency(&h, &r_vlc)?.value);
    }
    hybrid.extend(solo);
    Ok(hybrid)
}

fn js(r: Result<Vec<f64>>) -> std::result::Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = semiAngleCurve)]
pub fn semi_angle_curve_js(users: usize, rho_db: f64, sigma_db: f64, from: f64, to: f64, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(semi_angle_curve(users, rho_db, sigma_db, from, to, steps))
}

#[wasm_bindgen(js_name = snrCurves)]
pub fn snr_curves_js(users: usize, sigma_db: f64, from: f64, to: f64, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(snr_curves(users, sigma_db, from, to, steps))
}

#[wasm_bindgen(js_name = losCurves)]
pub fn los_curves_js(
    users: usize,
    rho_db: f64,
    sigma_db: f64,
    rf_sigma_rel: f64,
    joint: bool,
    steps: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    js(los_curves(users, rho_db, sigma_db, rf_sigma_rel, joint, steps))
}
