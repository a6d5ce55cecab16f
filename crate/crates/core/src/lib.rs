//! Average sum rate and energy efficiency of NOMA visible-light, RF and hybrid
//! VLC-RF downlinks with imperfect channel-state information.
//!
//! Every deterministic evaluator in [`analytic`] has a Monte Carlo counterpart
//! in [`mc`] built on the same per-user rate functions from [`rate`].

pub mod analytic;
pub mod channel;
pub mod error;
pub mod hybrid;
pub mod mc;
pub mod orderstats;
pub mod quad;
pub mod rate;
pub mod specialfn;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};

/// `10 log10(x)` to linear.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
