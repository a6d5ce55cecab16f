//! Parameter sweeps and their CSV records.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;

use super::config::Settings;
use crate::analytic::{
    analytic_noma_rf_sum_rate_with, analytic_noma_vlc_sum_rate_with, analytic_ofdma_vlc_sum_rate, AnalyticOptions,
};
use crate::error::{Error, Result};
use crate::hybrid::{energy_efficiency, hybrid_sum_rate, vlc_only_energy_efficiency};
use crate::mc::{mc_noma_rf_sum_rate_with, mc_noma_vlc_sum_rate_with, mc_ofdma_vlc_sum_rate_with};
use crate::rate::{Method, RateEstimate};

pub const CSV_HEADER: &str = "param,value,link,mode,method,estimate,std_error,trials,seed,config_digest";

macro_rules! string_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::Usage(format!(
                        concat!("unknown ", stringify!($name), " `{}`; expected one of: {}"),
                        other,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }
    };
}

string_enum!(SweepParam {
    SemiAngleDeg => "semi_angle_deg",
    RhoDb => "rho_db",
    K => "K",
    SigmaESqDb => "sigma_e_sq_db",
    L => "L",
    BetaLos => "beta_los",
    QVlc => "Q_vlc",
});

string_enum!(Scale {
    Linear => "linear",
    Log => "log",
});

// `vlc` and `rf` report bits per channel use; `hybrid` and `vlc_only` report bit/J.
string_enum!(Link {
    Vlc => "vlc",
    Rf => "rf",
    Hybrid => "hybrid",
    VlcOnly => "vlc_only",
});

string_enum!(Mode {
    Noma => "noma",
    Ofdma => "ofdma",
});

pub fn parse_method(s: &str) -> Result<Method> {
    match s {
        "analytic" => Ok(Method::Analytic),
        "mc" => Ok(Method::MonteCarlo),
        other => Err(Error::Usage(format!("unknown method `{other}`; expected analytic or mc"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn new(parameter: SweepParam, from: f64, to: f64, steps: usize, scale: Scale) -> Result<Self> {
        let bad = |msg: String| Err(Error::Usage(format!("sweep over {parameter}: {msg}")));
        if !(from.is_finite() && to.is_finite() && from < to) {
            return bad(format!("need from < to, got {from} .. {to}"));
        }
        if steps < 2 {
            return bad(format!("need at least 2 steps, got {steps}"));
        }
        if scale == Scale::Log && from <= 0.0 {
            return bad("log scale needs a positive range".into());
        }
        let ok = match parameter {
            SweepParam::SemiAngleDeg => from > 0.0 && to < 90.0,
            SweepParam::K => from >= 1.0 && to <= 60.0,
            SweepParam::SigmaESqDb => to <= 0.0,
            SweepParam::L => from > 0.0,
            SweepParam::BetaLos => from >= 0.0 && to <= 1.0,
            SweepParam::QVlc => from >= 0.0,
            SweepParam::RhoDb => true,
        };
        if !ok {
            return bad(format!("range {from} .. {to} is outside the parameter's domain"));
        }
        Ok(SweepSpec {
            parameter,
            from,
            to,
            steps,
            scale,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                let f = i as f64 / n as f64;
                let x = match self.scale {
                    Scale::Linear => self.from + (self.to - self.from) * f,
                    Scale::Log => (self.from.ln() + (self.to.ln() - self.from.ln()) * f).exp(),
                };
                // Pin the endpoints against rounding.
                let x = if i == 0 {
                    self.from
                } else if i == n {
                    self.to
                } else {
                    x
                };
                if self.parameter == SweepParam::K {
                    x.round()
                } else {
                    x
                }
            })
            .collect()
    }
}

/// Settings with one sweep parameter replaced.
pub fn apply_param(base: &Settings, param: SweepParam, value: f64) -> Result<Settings> {
    let mut s = base.clone();
    match param {
        SweepParam::SemiAngleDeg => s.vlc.semi_angle_deg = value,
        SweepParam::RhoDb => s.rho_db = Some(value),
        SweepParam::K => {
            s.users = value.round() as usize;
            s.alpha = None;
        }
        SweepParam::SigmaESqDb => s.sigma_e_sq_db = value,
        SweepParam::L => s.vlc.height = value,
        SweepParam::BetaLos => {
            s.beta_vlc = value;
            if s.beta_sweep_joint {
                s.beta_rf = value;
            }
        }
        SweepParam::QVlc => s.q_vlc = value,
    }
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub param: String,
    pub value: f64,
    pub link: Link,
    pub mode: Mode,
    pub method: Method,
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub config_digest: String,
    /// Evaluation failure; the row then carries `estimate = NaN`. Not serialized.
    pub error: Option<String>,
}

fn vlc_rate(s: &Settings, mode: Mode, method: Method) -> Result<RateEstimate> {
    let (rho, sigma) = (s.rho(), s.sigma_sq_vlc());
    match (mode, method) {
        (Mode::Noma, Method::Analytic) => {
            let opts = AnalyticOptions {
                strongest: s.strongest,
                ..Default::default()
            };
            analytic_noma_vlc_sum_rate_with(&s.vlc, &s.noma_alloc()?, rho, sigma, opts)
        }
        (Mode::Noma, Method::MonteCarlo) => {
            let opts = crate::mc::McOptions {
                strongest: s.strongest,
                ..s.mc_options
            };
            mc_noma_vlc_sum_rate_with(&s.vlc, &s.noma_alloc()?, rho, sigma, &s.mc, opts)
        }
        (Mode::Ofdma, Method::Analytic) => analytic_ofdma_vlc_sum_rate(&s.vlc, &s.ofdma_alloc()?, rho, sigma),
        (Mode::Ofdma, Method::MonteCarlo) => {
            mc_ofdma_vlc_sum_rate_with(&s.vlc, &s.ofdma_alloc()?, rho, sigma, &s.mc, s.mc_options)
        }
    }
}

fn rf_rate(s: &Settings, method: Method) -> Result<RateEstimate> {
    let sigma = s.sigma_sq_rf();
    match method {
        Method::Analytic => analytic_noma_rf_sum_rate_with(&s.rf, &s.noma_alloc()?, sigma, s.strongest),
        Method::MonteCarlo => {
            let opts = crate::mc::McOptions {
                strongest: s.strongest,
                ..s.mc_options
            };
            mc_noma_rf_sum_rate_with(&s.rf, &s.noma_alloc()?, sigma, &s.mc, opts)
        }
    }
}

/// One evaluation: `(estimate, std_error, trials)`.
///
/// The RF leg is always NOMA; `mode` selects the VLC multiple-access scheme.
pub fn evaluate(s: &Settings, link: Link, mode: Mode, method: Method) -> Result<(f64, f64, u64)> {
    let trials = |r: &RateEstimate| r.trials;
    match link {
        Link::Vlc => {
            let r = vlc_rate(s, mode, method)?;
            Ok((r.sum_rate, r.std_error, trials(&r)))
        }
        Link::Rf => {
            if mode == Mode::Ofdma {
                return Err(Error::Usage("the RF link is evaluated with NOMA only".into()));
            }
            let r = rf_rate(s, method)?;
            Ok((r.sum_rate, r.std_error, trials(&r)))
        }
        Link::Hybrid => {
            let h = s.hybrid();
            let v = vlc_rate(s, mode, method)?;
            let r = rf_rate(s, method)?;
            let ee = energy_efficiency(&h, hybrid_sum_rate(&h, &v, &r)?)?;
            Ok((ee.value, ee.std_error, trials(&v)))
        }
        Link::VlcOnly => {
            let v = vlc_rate(s, mode, method)?;
            let ee = vlc_only_energy_efficiency(&s.hybrid(), &v)?;
            Ok((ee.value, ee.std_error, trials(&v)))
        }
    }
}

/// Rows ordered by (value, mode, method); failures are recorded, not raised.
pub fn run_sweep(base: &Settings, link: Link, sweep: &SweepSpec, modes: &[Mode], methods: &[Method]) -> Vec<RunRecord> {
    let mut jobs = Vec::new();
    for value in sweep.points() {
        for &mode in modes {
            for &method in methods {
                jobs.push((value, mode, method));
            }
        }
    }
    jobs.par_iter()
        .map(|&(value, mode, method)| {
            let point = apply_param(base, sweep.parameter, value);
            let digest = point.as_ref().map(|p| p.digest()).unwrap_or_default();
            let outcome = point.and_then(|p| evaluate(&p, link, mode, method));
            let mc_trials = if method == Method::MonteCarlo { base.mc.trials } else { 0 };
            let (estimate, std_error, trials, error) = match outcome {
                Ok((e, se, n)) => (e, se, n, None),
                Err(err) => (f64::NAN, 0.0, mc_trials, Some(err.to_string())),
            };
            RunRecord {
                param: sweep.parameter.as_str().to_string(),
                value,
                link,
                mode,
                method,
                estimate,
                std_error,
                trials,
                seed: base.mc.seed,
                config_digest: digest,
                error,
            }
        })
        .collect()
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.param.clone(),
            format_sig17(r.value),
            r.link.to_string(),
            r.mode.to_string(),
            r.method.as_str().to_string(),
            format_sig17(r.estimate),
            format_sig17(r.std_error),
            r.trials.to_string(),
            r.seed.to_string(),
            r.config_digest.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Usage(format!("unexpected CSV header `{}`", header.join(","))));
    }
    let num = |s: &str, col: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::Usage(format!("bad number `{s}` in column {col}")))
    };
    let int = |s: &str, col: &str| -> Result<u64> {
        s.parse().map_err(|_| Error::Usage(format!("bad integer `{s}` in column {col}")))
    };
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        out.push(RunRecord {
            param: row[0].to_string(),
            value: num(&row[1], "value")?,
            link: row[2].parse()?,
            mode: row[3].parse()?,
            method: parse_method(&row[4])?,
            estimate: num(&row[5], "estimate")?,
            std_error: num(&row[6], "std_error")?,
            trials: int(&row[7], "trials")?,
            seed: int(&row[8], "seed")?,
            config_digest: row[9].to_string(),
            error: None,
        });
    }
    Ok(out)
}
