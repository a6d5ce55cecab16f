//! Flat key-value run configuration.
//!
//! Precedence, lowest first: built-in defaults, `HYBRID_NOMA_SEED`, the config
//! file, command-line overrides. Every resolved key remembers where it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};
use toml::Value;

use crate::channel::{RfApConfig, VlcApConfig};
use crate::error::{Error, Result};
use crate::hybrid::{HybridConfig, DEFAULT_TOTAL_RF_USER_POWER};
use crate::mc::{ErrorRealization, McConfig, McOptions, SortKey};
use crate::rate::{NomaAllocation, OfdmaAllocation, StrongestUserSinr, DEFAULT_GEOMETRIC_RATIO};
use crate::{db_to_linear, linear_to_db};

pub const SEED_ENV: &str = "HYBRID_NOMA_SEED";

/// Every accepted key, in echo and digest order.
pub const KEYS: &[&str] = &[
    "height",
    "cell_radius",
    "semi_angle_deg",
    "pd_area",
    "responsivity",
    "filter_gain",
    "fov_deg",
    "refractive_index",
    "tx_elec_power",
    "noise_psd",
    "bandwidth_vlc",
    "rho_db",
    "sigma_e_sq_db",
    "K",
    "alloc_ratio",
    "alpha",
    "strongest_sinr",
    "rf_path_loss_exp",
    "rf_cell_radius",
    "rf_chebyshev_order",
    "rf_tx_power",
    "rf_noise_var",
    "bandwidth_rf",
    "rf_sigma_sq_rel",
    "beta_vlc",
    "beta_rf",
    "beta_sweep_joint",
    "q_vlc",
    "q_rf",
    "p_rf_total",
    "mc_trials",
    "mc_batch",
    "seed",
    "mc_error_realization",
    "mc_sort",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Default,
    Env,
    File { line: usize },
    Flag,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Default => write!(f, "default"),
            Source::Env => write!(f, "env {SEED_ENV}"),
            Source::File { line } => write!(f, "file line {line}"),
            Source::Flag => write!(f, "flag"),
        }
    }
}

/// Fully resolved parameters of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub vlc: VlcApConfig,
    pub rf: RfApConfig,
    pub users: usize,
    /// Transmit SNR in dB; `None` derives it from `tx_elec_power / (noise_psd B)`.
    pub rho_db: Option<f64>,
    /// VLC error variance in dB; `-inf` is perfect CSI.
    pub sigma_e_sq_db: f64,
    pub alloc_ratio: f64,
    pub alpha: Option<Vec<f64>>,
    pub strongest: StrongestUserSinr,
    /// RF error variance as a fraction of the cell-edge path gain `D^-PL`.
    pub rf_sigma_sq_rel: f64,
    pub beta_vlc: f64,
    pub beta_rf: f64,
    /// Whether a `beta_los` sweep moves both links or only VLC.
    pub beta_sweep_joint: bool,
    pub q_vlc: f64,
    pub q_rf: f64,
    pub p_rf_total: f64,
    pub mc: McConfig,
    pub mc_options: McOptions,
    provenance: BTreeMap<&'static str, Source>,
}

impl Default for Settings {
    fn default() -> Self {
        let hybrid = HybridConfig::default();
        Settings {
            vlc: VlcApConfig::default(),
            rf: RfApConfig::default(),
            users: 2,
            rho_db: None,
            sigma_e_sq_db: f64::NEG_INFINITY,
            alloc_ratio: DEFAULT_GEOMETRIC_RATIO,
            alpha: None,
            strongest: StrongestUserSinr::Consistent,
            rf_sigma_sq_rel: 0.0,
            beta_vlc: hybrid.beta_vlc,
            beta_rf: hybrid.beta_rf,
            beta_sweep_joint: true,
            q_vlc: hybrid.q_vlc,
            q_rf: hybrid.q_rf,
            p_rf_total: DEFAULT_TOTAL_RF_USER_POWER,
            mc: McConfig::default(),
            mc_options: McOptions::default(),
            provenance: KEYS.iter().map(|&k| (k, Source::Default)).collect(),
        }
    }
}

fn canonical_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|&k| k == key)
}

fn as_f64(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(format!("expected a number, got {}", other.type_str())),
    }
}

fn as_count(v: &Value) -> std::result::Result<u64, String> {
    match v {
        Value::Integer(i) if *i >= 1 => Ok(*i as u64),
        Value::Integer(i) => Err(format!("expected a positive integer, got {i}")),
        other => Err(format!("expected an integer, got {}", other.type_str())),
    }
}

fn as_str(v: &Value) -> std::result::Result<&str, String> {
    v.as_str().ok_or_else(|| format!("expected a string, got {}", v.type_str()))
}

fn positive(v: &Value) -> std::result::Result<f64, String> {
    let x = as_f64(v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {x}"))
    }
}

fn non_negative(v: &Value) -> std::result::Result<f64, String> {
    let x = as_f64(v)?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be non-negative and finite, got {x}"))
    }
}

fn probability(v: &Value) -> std::result::Result<f64, String> {
    let x = as_f64(v)?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("must lie in [0, 1], got {x}"))
    }
}

fn open_range(v: &Value, lo: f64, hi: f64) -> std::result::Result<f64, String> {
    let x = as_f64(v)?;
    if x > lo && x < hi {
        Ok(x)
    } else {
        Err(format!("must lie in ({lo}, {hi}), got {x}"))
    }
}

impl Settings {
    /// Defaults plus the seed environment variable, if set.
    pub fn from_env() -> Result<Self> {
        let mut s = Settings::default();
        if let Ok(raw) = std::env::var(SEED_ENV) {
            let seed: u64 = raw.trim().parse().map_err(|_| Error::Config {
                key: SEED_ENV.into(),
                line: None,
                msg: format!("expected an unsigned integer, got `{raw}`"),
            })?;
            s.mc.seed = seed;
            s.provenance.insert("seed", Source::Env);
        }
        Ok(s)
    }

    /// Applies a config file on top of `self`.
    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            key: path.display().to_string(),
            line: None,
            msg: format!("cannot read config file: {e}"),
        })?;
        self.merge_str(&text)
    }

    pub fn merge_str(&mut self, text: &str) -> Result<()> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config {
            key: "<syntax>".into(),
            line: e.span().map(|s| line_of(text, s.start)),
            msg: e.message().to_string(),
        })?;
        for (key, value) in &table {
            let line = key_line(text, key);
            self.set(key, value, Source::File { line })?;
        }
        self.validate()
    }

    /// Applies a `key=value` override; the value uses config-file syntax,
    /// with bare words accepted as strings.
    pub fn set_flag(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| {
            Error::Usage(format!("override `{assignment}` must look like key=value"))
        })?;
        let key = key.trim();
        let value = parse_value(raw.trim()).map_err(|msg| Error::Config {
            key: key.into(),
            line: None,
            msg,
        })?;
        self.set(key, &value, Source::Flag)?;
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &Value, source: Source) -> Result<()> {
        let Some(key) = canonical_key(key) else {
            return Err(Error::Config {
                key: key.into(),
                line: match source {
                    Source::File { line } => Some(line),
                    _ => None,
                },
                msg: "unknown key".into(),
            });
        };
        let line = match source {
            Source::File { line } => Some(line),
            _ => None,
        };
        self.apply(key, value).map_err(|msg| Error::Config {
            key: key.into(),
            line,
            msg,
        })?;
        self.provenance.insert(key, source);
        Ok(())
    }

    fn apply(&mut self, key: &str, v: &Value) -> std::result::Result<(), String> {
        match key {
            "height" => self.vlc.height = positive(v)?,
            "cell_radius" => self.vlc.cell_radius = positive(v)?,
            "semi_angle_deg" => self.vlc.semi_angle_deg = open_range(v, 0.0, 90.0)?,
            "pd_area" => self.vlc.pd_area = positive(v)?,
            "responsivity" => self.vlc.responsivity = positive(v)?,
            "filter_gain" => self.vlc.filter_gain = positive(v)?,
            "fov_deg" => {
                let x = as_f64(v)?;
                if !(x > 0.0 && x <= 90.0) {
                    return Err(format!("must lie in (0, 90], got {x}"));
                }
                self.vlc.fov_deg = x;
            }
            "refractive_index" => self.vlc.refractive_index = positive(v)?,
            "tx_elec_power" => self.vlc.tx_elec_power = positive(v)?,
            "noise_psd" => self.vlc.noise_psd = positive(v)?,
            "bandwidth_vlc" => self.vlc.bandwidth = positive(v)?,
            "rho_db" => {
                let x = as_f64(v)?;
                if !x.is_finite() {
                    return Err(format!("must be finite, got {x}"));
                }
                self.rho_db = Some(x);
            }
            "sigma_e_sq_db" => {
                let x = as_f64(v)?;
                if x.is_nan() || x == f64::INFINITY || x > 0.0 {
                    return Err(format!("must be <= 0 dB or -inf, got {x}"));
                }
                self.sigma_e_sq_db = x;
            }
            "K" => {
                let k = as_count(v)?;
                if k > 60 {
                    return Err(format!("at most 60 users are supported, got {k}"));
                }
                self.users = k as usize;
            }
            "alloc_ratio" => {
                let x = as_f64(v)?;
                if !(x > 0.0 && x <= 1.0) {
                    return Err(format!("must lie in (0, 1], got {x}"));
                }
                self.alloc_ratio = x;
            }
            "alpha" => {
                let arr = v.as_array().ok_or("expected an array of numbers")?;
                let coeffs = arr.iter().map(as_f64).collect::<std::result::Result<Vec<_>, _>>()?;
                if coeffs.is_empty() {
                    self.alpha = None;
                } else {
                    NomaAllocation::new(coeffs.clone()).map_err(|e| e.to_string())?;
                    self.alpha = Some(coeffs);
                }
            }
            "strongest_sinr" => {
                self.strongest = match as_str(v)? {
                    "consistent" => StrongestUserSinr::Consistent,
                    "as-printed" => StrongestUserSinr::AsPrinted,
                    s => return Err(format!("expected `consistent` or `as-printed`, got `{s}`")),
                }
            }
            "rf_path_loss_exp" => {
                let x = as_f64(v)?;
                if !(x >= 2.0 && x.is_finite()) {
                    return Err(format!("must be >= 2, got {x}"));
                }
                self.rf.path_loss_exp = x;
            }
            "rf_cell_radius" => self.rf.cell_radius = positive(v)?,
            "rf_chebyshev_order" => {
                let n = as_count(v)?;
                if n > 200 {
                    return Err(format!("at most 200 nodes are supported, got {n}"));
                }
                self.rf.chebyshev_order = n as usize;
            }
            "rf_tx_power" => self.rf.tx_power = positive(v)?,
            "rf_noise_var" => self.rf.noise_var = positive(v)?,
            "bandwidth_rf" => self.rf.bandwidth = positive(v)?,
            "rf_sigma_sq_rel" => {
                let x = as_f64(v)?;
                if !(0.0..1.0).contains(&x) {
                    return Err(format!("must lie in [0, 1), got {x}"));
                }
                self.rf_sigma_sq_rel = x;
            }
            "beta_vlc" => self.beta_vlc = probability(v)?,
            "beta_rf" => self.beta_rf = probability(v)?,
            "beta_sweep_joint" => self.beta_sweep_joint = v.as_bool().ok_or("expected true or false")?,
            "q_vlc" => self.q_vlc = non_negative(v)?,
            "q_rf" => self.q_rf = non_negative(v)?,
            "p_rf_total" => self.p_rf_total = non_negative(v)?,
            "mc_trials" => self.mc.trials = as_count(v)?,
            "mc_batch" => self.mc.batch = as_count(v)?,
            "seed" => match v {
                Value::Integer(i) if *i >= 0 => self.mc.seed = *i as u64,
                _ => return Err("expected a non-negative integer".into()),
            },
            "mc_error_realization" => {
                self.mc_options.realization = match as_str(v)? {
                    "estimate-from-geometry" => ErrorRealization::EstimateFromGeometry,
                    "true-from-geometry" => ErrorRealization::TrueFromGeometry,
                    s => {
                        return Err(format!(
                            "expected `estimate-from-geometry` or `true-from-geometry`, got `{s}`"
                        ))
                    }
                }
            }
            "mc_sort" => {
                // A bare `true` on the command line parses as a boolean.
                let word = match v {
                    Value::Boolean(true) => "true",
                    _ => as_str(v)?,
                };
                self.mc_options.sort_key = match word {
                    "estimated" => SortKey::Estimated,
                    "true" => SortKey::True,
                    s => return Err(format!("expected `estimated` or `true`, got `{s}`")),
                }
            }
            _ => unreachable!("every canonical key is handled"),
        }
        Ok(())
    }

    /// Cross-key checks.
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = &self.alpha {
            if a.len() != self.users {
                return Err(Error::Config {
                    key: "alpha".into(),
                    line: self.line_of("alpha"),
                    msg: format!("has {} coefficients but K = {}", a.len(), self.users),
                });
            }
        }
        self.vlc.validate()?;
        self.rf.validate()?;
        self.hybrid().validate()?;
        self.mc.validate()
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        match self.provenance.get(key) {
            Some(Source::File { line }) => Some(*line),
            _ => None,
        }
    }

    pub fn source(&self, key: &str) -> Option<&Source> {
        self.provenance.get(key)
    }

    /// Linear VLC transmit SNR.
    pub fn rho(&self) -> f64 {
        self.rho_db.map_or_else(|| self.vlc.derived_snr(), db_to_linear)
    }

    pub fn sigma_sq_vlc(&self) -> f64 {
        if self.sigma_e_sq_db == f64::NEG_INFINITY {
            0.0
        } else {
            db_to_linear(self.sigma_e_sq_db)
        }
    }

    pub fn sigma_sq_rf(&self) -> f64 {
        self.rf_sigma_sq_rel * self.rf.edge_path_gain()
    }

    pub fn noma_alloc(&self) -> Result<NomaAllocation> {
        match &self.alpha {
            Some(a) => NomaAllocation::new(a.clone()),
            None => NomaAllocation::geometric(self.users, self.alloc_ratio),
        }
    }

    pub fn ofdma_alloc(&self) -> Result<OfdmaAllocation> {
        OfdmaAllocation::equal(self.users)
    }

    pub fn hybrid(&self) -> HybridConfig {
        HybridConfig {
            beta_vlc: self.beta_vlc,
            beta_rf: self.beta_rf,
            bandwidth_vlc: self.vlc.bandwidth,
            bandwidth_rf: self.rf.bandwidth,
            q_vlc: self.q_vlc,
            q_rf: self.q_rf,
            p_rf_users: vec![self.p_rf_total / self.users as f64; self.users],
        }
    }

    /// Resolved value of every key, as config-file text.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        let f = |x: f64| format_float(x);
        KEYS.iter()
            .map(|&k| {
                let v = match k {
                    "height" => f(self.vlc.height),
                    "cell_radius" => f(self.vlc.cell_radius),
                    "semi_angle_deg" => f(self.vlc.semi_angle_deg),
                    "pd_area" => f(self.vlc.pd_area),
                    "responsivity" => f(self.vlc.responsivity),
                    "filter_gain" => f(self.vlc.filter_gain),
                    "fov_deg" => f(self.vlc.fov_deg),
                    "refractive_index" => f(self.vlc.refractive_index),
                    "tx_elec_power" => f(self.vlc.tx_elec_power),
                    "noise_psd" => f(self.vlc.noise_psd),
                    "bandwidth_vlc" => f(self.vlc.bandwidth),
                    "rho_db" => f(self.rho_db.unwrap_or_else(|| linear_to_db(self.vlc.derived_snr()))),
                    "sigma_e_sq_db" => f(self.sigma_e_sq_db),
                    "K" => self.users.to_string(),
                    "alloc_ratio" => f(self.alloc_ratio),
                    "alpha" => match &self.alpha {
                        Some(a) => format!("[{}]", a.iter().map(|&x| f(x)).collect::<Vec<_>>().join(", ")),
                        None => "[]".into(),
                    },
                    "strongest_sinr" => match self.strongest {
                        StrongestUserSinr::Consistent => "\"consistent\"".into(),
                        StrongestUserSinr::AsPrinted => "\"as-printed\"".into(),
                    },
                    "rf_path_loss_exp" => f(self.rf.path_loss_exp),
                    "rf_cell_radius" => f(self.rf.cell_radius),
                    "rf_chebyshev_order" => self.rf.chebyshev_order.to_string(),
                    "rf_tx_power" => f(self.rf.tx_power),
                    "rf_noise_var" => f(self.rf.noise_var),
                    "bandwidth_rf" => f(self.rf.bandwidth),
                    "rf_sigma_sq_rel" => f(self.rf_sigma_sq_rel),
                    "beta_vlc" => f(self.beta_vlc),
                    "beta_rf" => f(self.beta_rf),
                    "beta_sweep_joint" => self.beta_sweep_joint.to_string(),
                    "q_vlc" => f(self.q_vlc),
                    "q_rf" => f(self.q_rf),
                    "p_rf_total" => f(self.p_rf_total),
                    "mc_trials" => self.mc.trials.to_string(),
                    "mc_batch" => self.mc.batch.to_string(),
                    "seed" => self.mc.seed.to_string(),
                    "mc_error_realization" => match self.mc_options.realization {
                        ErrorRealization::EstimateFromGeometry => "\"estimate-from-geometry\"".into(),
                        ErrorRealization::TrueFromGeometry => "\"true-from-geometry\"".into(),
                    },
                    "mc_sort" => match self.mc_options.sort_key {
                        SortKey::Estimated => "\"estimated\"".into(),
                        SortKey::True => "\"true\"".into(),
                    },
                    _ => unreachable!(),
                };
                (k, v)
            })
            .collect()
    }

    /// Resolved configuration with one provenance comment per key.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.resolved() {
            let src = self.provenance.get(k).cloned().unwrap_or(Source::Default);
            out.push_str(&format!("{k} = {v}  # {src}\n"));
        }
        out
    }

    /// First 16 hex digits of the SHA-256 of the resolved configuration.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.resolved() {
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
            h.update(b"\n");
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Shortest text that parses back to the same float; `inf`/`nan` spelled for TOML.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let s = format!("{x:?}");
        if s.contains(['.', 'e', 'E']) { s } else { format!("{s}.0") }
    }
}

fn parse_value(raw: &str) -> std::result::Result<Value, String> {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => Ok(t.remove("v").expect("key present")),
        Err(_) if !raw.is_empty() && raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') => {
            Ok(Value::String(raw.to_string()))
        }
        Err(e) => Err(format!("cannot parse value `{raw}`: {}", e.message())),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line where `key` is assigned at top level.
fn key_line(text: &str, key: &str) -> usize {
    for (i, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if let Some(header) = t.strip_prefix('[') {
            if header.trim_start_matches('[').trim_start().starts_with(key) {
                return i + 1;
            }
        }
        let t = t
            .strip_prefix('"')
            .and_then(|r| r.strip_prefix(key)?.strip_prefix('"'))
            .or_else(|| t.strip_prefix(key));
        if let Some(rest) = t {
            let rest = rest.trim_start();
            if rest.starts_with('=') || rest.starts_with('.') {
                return i + 1;
            }
        }
    }
    0
}
