//! Presets that regenerate the data behind each reference figure.
//!
//! A figure is a set of curve families. Each family is one link/mode pair
//! with fixed overrides and a sweep; it is written to its own CSV carrying both
//! analytic and Monte Carlo rows.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::Value;

use super::config::{format_float, Settings, Source};
use super::sweep::{run_sweep, write_csv, Link, Mode, Scale, SweepParam, SweepSpec};
use crate::error::{Error, Result};
use crate::rate::Method;

pub const FIGURES: &[&str] = &[
    "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12", "fig13",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureId(u8);

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FIGURES
            .iter()
            .position(|&f| f == s)
            .map(|i| FigureId(i as u8 + 3))
            .ok_or_else(|| Error::Usage(format!("unknown figure `{s}`; expected one of {}", FIGURES.join(", "))))
    }
}

impl FigureId {
    pub fn name(self) -> &'static str {
        FIGURES[self.0 as usize - 3]
    }

    pub fn all() -> impl Iterator<Item = FigureId> {
        (3..=13).map(FigureId)
    }
}

#[derive(Debug, Clone)]
pub struct Family {
    pub name: String,
    pub link: Link,
    pub mode: Mode,
    pub overrides: Vec<(&'static str, Value)>,
    pub sweep: SweepSpec,
}

/// Named VLC error levels of the sum-rate figures, in dB.
const SUMRATE_CSI: [(&str, f64); 3] = [("perfect", f64::NEG_INFINITY), ("moderate", -120.0), ("high", -110.0)];
/// Levels for the user-count figure, where -110 dB already flattens every curve.
const USERS_CSI: [(&str, f64); 3] = [("perfect", f64::NEG_INFINITY), ("moderate", -130.0), ("high", -120.0)];
/// Levels for the energy figures: VLC variance in dB and RF variance relative to `D^-PL`.
const ENERGY_CSI: [(&str, f64, f64); 3] = [
    ("perfect", f64::NEG_INFINITY, 0.0),
    ("moderate", -130.0, 0.01),
    ("high", -120.0, 0.1),
];

fn spec(p: SweepParam, from: f64, to: f64, steps: usize) -> SweepSpec {
    SweepSpec::new(p, from, to, steps, Scale::Linear).expect("preset sweeps are valid")
}

fn f(x: f64) -> Value {
    Value::Float(x)
}

fn int(x: i64) -> Value {
    Value::Integer(x)
}

fn family(name: String, link: Link, mode: Mode, overrides: Vec<(&'static str, Value)>, sweep: SweepSpec) -> Family {
    Family {
        name,
        link,
        mode,
        overrides,
        sweep,
    }
}

pub fn preset(id: FigureId) -> Vec<Family> {
    let mut out = Vec::new();
    let energy_base = |users: i64| vec![("K", int(users)), ("rho_db", f(150.0))];
    match id.0 {
        3 => {
            for users in [2, 5, 10] {
                for (csi, db) in SUMRATE_CSI {
                    out.push(family(
                        format!("K{users}_{csi}"),
                        Link::Vlc,
                        Mode::Noma,
                        vec![("K", int(users)), ("sigma_e_sq_db", f(db))],
                        spec(SweepParam::SemiAngleDeg, 15.0, 80.0, 14),
                    ));
                }
            }
        }
        4 => {
            for users in [2, 5] {
                for (csi, db) in SUMRATE_CSI {
                    out.push(family(
                        format!("K{users}_{csi}"),
                        Link::Vlc,
                        Mode::Noma,
                        vec![("K", int(users)), ("sigma_e_sq_db", f(db))],
                        spec(SweepParam::RhoDb, 100.0, 200.0, 11),
                    ));
                }
            }
        }
        5 => {
            for mode in [Mode::Noma, Mode::Ofdma] {
                for (csi, db) in SUMRATE_CSI {
                    out.push(family(
                        format!("{mode}_{csi}"),
                        Link::Vlc,
                        mode,
                        vec![("K", int(5)), ("sigma_e_sq_db", f(db))],
                        spec(SweepParam::RhoDb, 100.0, 200.0, 11),
                    ));
                }
            }
        }
        6 => {
            for (csi, db) in USERS_CSI {
                out.push(family(
                    csi.to_string(),
                    Link::Vlc,
                    Mode::Noma,
                    vec![("rho_db", f(150.0)), ("sigma_e_sq_db", f(db))],
                    spec(SweepParam::K, 2.0, 10.0, 9),
                ));
            }
        }
        7 => {
            for users in [2, 5] {
                for (csi, db) in SUMRATE_CSI {
                    out.push(family(
                        format!("K{users}_{csi}"),
                        Link::Vlc,
                        Mode::Noma,
                        vec![("K", int(users)), ("sigma_e_sq_db", f(db))],
                        spec(SweepParam::L, 1.0, 4.0, 13),
                    ));
                }
            }
        }
        8 => {
            for users in [2, 5] {
                out.push(family(
                    format!("K{users}"),
                    Link::Vlc,
                    Mode::Noma,
                    vec![("K", int(users))],
                    spec(SweepParam::SigmaESqDb, -140.0, -100.0, 9),
                ));
            }
        }
        9 => {
            for mode in [Mode::Noma, Mode::Ofdma] {
                out.push(family(
                    mode.to_string(),
                    Link::Vlc,
                    mode,
                    vec![("K", int(5))],
                    spec(SweepParam::SigmaESqDb, -140.0, -100.0, 9),
                ));
            }
        }
        10 => {
            for (csi, db, rel) in ENERGY_CSI {
                let mut o = energy_base(4);
                o.extend([("sigma_e_sq_db", f(db)), ("rf_sigma_sq_rel", f(rel))]);
                out.push(family(
                    csi.to_string(),
                    Link::Hybrid,
                    Mode::Noma,
                    o,
                    spec(SweepParam::BetaLos, 0.0, 1.0, 11),
                ));
            }
        }
        11 => {
            let (_, db, rel) = ENERGY_CSI[2];
            for mode in [Mode::Noma, Mode::Ofdma] {
                for beta in [0.5, 1.0] {
                    let mut o = energy_base(4);
                    o.extend([
                        ("sigma_e_sq_db", f(db)),
                        ("rf_sigma_sq_rel", f(rel)),
                        ("beta_vlc", f(beta)),
                        ("beta_rf", f(beta)),
                    ]);
                    out.push(family(
                        format!("{mode}_beta{}", (beta * 100.0) as u32),
                        Link::Hybrid,
                        mode,
                        o,
                        spec(SweepParam::QVlc, 1.0, 10.0, 10),
                    ));
                }
            }
        }
        12 => {
            for (csi, db, rel) in [ENERGY_CSI[0], ENERGY_CSI[2]] {
                for beta in [0.5, 1.0] {
                    let o = vec![
                        ("rho_db", f(150.0)),
                        ("sigma_e_sq_db", f(db)),
                        ("rf_sigma_sq_rel", f(rel)),
                        ("beta_vlc", f(beta)),
                        ("beta_rf", f(beta)),
                    ];
                    out.push(family(
                        format!("{csi}_beta{}", (beta * 100.0) as u32),
                        Link::Hybrid,
                        Mode::Noma,
                        o,
                        spec(SweepParam::K, 1.0, 10.0, 10),
                    ));
                }
            }
        }
        13 => {
            for (csi, db, rel) in [ENERGY_CSI[0], ENERGY_CSI[2]] {
                for link in [Link::Hybrid, Link::VlcOnly] {
                    let mut o = energy_base(4);
                    o.extend([
                        ("sigma_e_sq_db", f(db)),
                        ("rf_sigma_sq_rel", f(rel)),
                        ("beta_rf", f(1.0)),
                        ("beta_sweep_joint", Value::Boolean(false)),
                    ]);
                    out.push(family(
                        format!("{link}_{csi}"),
                        link,
                        Mode::Noma,
                        o,
                        spec(SweepParam::BetaLos, 0.0, 1.0, 11),
                    ));
                }
            }
        }
        _ => unreachable!("figure ids are 3..=13"),
    }
    out
}

/// Base settings with a family's overrides applied.
pub fn family_settings(base: &Settings, fam: &Family) -> Result<Settings> {
    let mut s = base.clone();
    for (k, v) in &fam.overrides {
        // Explicit user flags win over preset values.
        if s.source(k) == Some(&Source::Flag) {
            continue;
        }
        s.set(k, v, Source::Default)?;
    }
    s.validate()?;
    Ok(s)
}

/// Writes one CSV per family, a manifest and a gnuplot script; returns the paths.
pub fn reproduce_figure(base: &Settings, id: FigureId, out_dir: &Path, methods: &[Method]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let fig = id.name();
    let families = preset(id);
    let mut written = Vec::new();
    let mut manifest = String::new();
    writeln!(manifest, "figure = \"{fig}\"").unwrap();
    writeln!(manifest, "methods = [{}]", methods.iter().map(|m| format!("\"{}\"", m.as_str())).collect::<Vec<_>>().join(", ")).unwrap();
    writeln!(manifest, "base_config_digest = \"{}\"", base.digest()).unwrap();

    for fam in &families {
        let settings = family_settings(base, fam)?;
        let rows = run_sweep(&settings, fam.link, &fam.sweep, &[fam.mode], methods);
        for r in rows.iter().filter_map(|r| r.error.as_ref().map(|e| (r, e))) {
            eprintln!("warning: {fig}/{} at {} = {}: {}", fam.name, r.0.param, r.0.value, r.1);
        }
        let path = out_dir.join(format!("{fig}_{}.csv", fam.name));
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows)?;
        fs::write(&path, buf)?;
        written.push(path);

        writeln!(manifest, "\n[family.{}]", fam.name).unwrap();
        writeln!(manifest, "csv = \"{fig}_{}.csv\"", fam.name).unwrap();
        writeln!(manifest, "link = \"{}\"", fam.link).unwrap();
        writeln!(manifest, "mode = \"{}\"", fam.mode).unwrap();
        writeln!(
            manifest,
            "sweep = {{ param = \"{}\", from = {}, to = {}, steps = {}, scale = \"{}\" }}",
            fam.sweep.parameter,
            format_float(fam.sweep.from),
            format_float(fam.sweep.to),
            fam.sweep.steps,
            fam.sweep.scale
        )
        .unwrap();
        for (k, v) in &fam.overrides {
            writeln!(manifest, "{k} = {v}").unwrap();
        }
        writeln!(manifest, "config_digest = \"{}\"", settings.digest()).unwrap();
    }

    let mpath = out_dir.join(format!("{fig}.manifest"));
    fs::write(&mpath, manifest)?;
    written.push(mpath);
    let gpath = out_dir.join(format!("{fig}.gp"));
    fs::write(&gpath, gnuplot_script(id, &families))?;
    written.push(gpath);
    Ok(written)
}

fn gnuplot_script(id: FigureId, families: &[Family]) -> String {
    let fig = id.name();
    let x = families.first().map(|f| f.sweep.parameter.as_str()).unwrap_or("value");
    let y = match families.first().map(|f| f.link) {
        Some(Link::Hybrid | Link::VlcOnly) => "energy efficiency (bit/J)",
        _ => "sum rate (bpcu)",
    };
    let mut s = String::new();
    writeln!(s, "# gnuplot {fig}.gp").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set terminal pngcairo size 900,600").unwrap();
    writeln!(s, "set output '{fig}.png'").unwrap();
    writeln!(s, "set xlabel '{x}'").unwrap();
    writeln!(s, "set ylabel '{y}'").unwrap();
    writeln!(s, "set key outside right").unwrap();
    writeln!(s, "set grid").unwrap();
    let mut parts = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        let file = format!("{fig}_{}.csv", fam.name);
        let c = i + 1;
        parts.push(format!(
            "'{file}' every ::1 using 2:(strcol(5) eq 'analytic' ? $6 : 1/0) with lines lc {c} title '{} analytic'",
            fam.name
        ));
        parts.push(format!(
            "'{file}' every ::1 using 2:(strcol(5) eq 'mc' ? $6 : 1/0):7 with yerrorbars pt 7 ps 0.5 lc {c} title '{} mc'",
            fam.name
        ));
    }
    writeln!(s, "plot \\\n  {}", parts.join(", \\\n  ")).unwrap();
    s
}
