use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hybrid_noma::cli::figures::FigureId;
use hybrid_noma::cli::sweep::{evaluate, parse_method, run_sweep, write_csv, Link, Mode, Scale, SweepParam, SweepSpec};
use hybrid_noma::cli::{reproduce_figure, selftest, Settings};
use hybrid_noma::hybrid::{energy_efficiency, hybrid_sum_rate, vlc_only_energy_efficiency};
use hybrid_noma::rate::Method;
use hybrid_noma::{Error, Result};

/// Average sum rate and energy efficiency of NOMA VLC, RF and hybrid VLC-RF
/// downlinks under imperfect channel-state information.
#[derive(Parser)]
#[command(name = "hybrid-noma", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Flat key-value config file; unset keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set K=5`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// VLC transmit SNR in dB.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho_db: Option<f64>,
    /// VLC estimation-error variance in dB (`-inf` for perfect CSI).
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma_e_db: Option<String>,
    /// Number of users.
    #[arg(long, short = 'K', global = true)]
    users: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials per evaluation.
    #[arg(long, global = true)]
    trials: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Average sum rate of one link.
    Sumrate {
        #[arg(long, default_value = "vlc")]
        link: String,
        #[arg(long, default_value = "noma")]
        mode: String,
        /// analytic, mc or both.
        #[arg(long, default_value = "both")]
        method: String,
    },
    /// Hybrid throughput and energy efficiency.
    Energy {
        /// Multiple access on the VLC leg.
        #[arg(long, default_value = "noma")]
        mode: String,
        #[arg(long, default_value = "analytic")]
        method: String,
    },
    /// Sweep one parameter and write CSV.
    Sweep {
        #[arg(long, default_value = "vlc")]
        link: String,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, default_value = "linear")]
        scale: String,
        /// Comma-separated: noma, ofdma.
        #[arg(long, default_value = "noma")]
        modes: String,
        /// Comma-separated: analytic, mc.
        #[arg(long, default_value = "analytic,mc")]
        methods: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the data, manifest and plot script of a figure.
    Reproduce {
        /// fig3 ... fig13, or `all`.
        #[arg(long)]
        figure: String,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value = "analytic,mc")]
        methods: String,
    },
    /// Compare every analytic evaluator with Monte Carlo.
    Selftest,
    /// Print the resolved configuration with the source of every key.
    Config,
}

fn settings(g: &GlobalArgs) -> Result<Settings> {
    let mut s = Settings::from_env()?;
    if let Some(path) = &g.config {
        s.merge_file(path)?;
    }
    for o in &g.overrides {
        s.set_flag(o)?;
    }
    if let Some(v) = g.rho_db {
        s.set_flag(&format!("rho_db={v:?}"))?;
    }
    if let Some(v) = &g.sigma_e_db {
        s.set_flag(&format!("sigma_e_sq_db={v}"))?;
    }
    if let Some(v) = g.users {
        s.set_flag(&format!("K={v}"))?;
    }
    if let Some(v) = g.seed {
        s.set_flag(&format!("seed={v}"))?;
    }
    if let Some(v) = g.trials {
        s.set_flag(&format!("mc_trials={v}"))?;
    }
    Ok(s)
}

fn methods(list: &str) -> Result<Vec<Method>> {
    if list == "both" {
        return Ok(vec![Method::Analytic, Method::MonteCarlo]);
    }
    list.split(',').map(|m| parse_method(m.trim())).collect()
}

fn modes(list: &str) -> Result<Vec<Mode>> {
    list.split(',').map(|m| m.trim().parse()).collect()
}

fn run(cli: Cli) -> Result<()> {
    let s = settings(&cli.global)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Sumrate { link, mode, method } => {
            let link: Link = link.parse()?;
            let mode: Mode = mode.parse()?;
            let unit = match link {
                Link::Vlc | Link::Rf => "bpcu",
                Link::Hybrid | Link::VlcOnly => "bit/J",
            };
            for m in methods(&method)? {
                let (est, se, trials) = evaluate(&s, link, mode, m)?;
                match m {
                    Method::Analytic => writeln!(out, "{link} {mode} analytic: {est:.6} {unit}")?,
                    Method::MonteCarlo => {
                        writeln!(out, "{link} {mode} mc: {est:.6} +- {se:.6} {unit} ({trials} trials, seed {})", s.mc.seed)?
                    }
                }
            }
        }
        Command::Energy { mode, method } => {
            let mode: Mode = mode.parse()?;
            let h = s.hybrid();
            for m in methods(&method)? {
                let (rv, _, _) = evaluate(&s, Link::Vlc, mode, m)?;
                let (rr, _, _) = evaluate(&s, Link::Rf, Mode::Noma, m)?;
                let as_est = |v: f64| hybrid_noma::rate::RateEstimate::analytic(vec![v]);
                let sum = hybrid_sum_rate(&h, &as_est(rv), &as_est(rr))?;
                let ee = energy_efficiency(&h, sum)?;
                let vo = vlc_only_energy_efficiency(&h, &as_est(rv))?;
                writeln!(out, "[{}]", m.as_str())?;
                writeln!(out, "vlc sum rate      {rv:.6} bpcu")?;
                writeln!(out, "rf sum rate       {rr:.6} bpcu")?;
                writeln!(out, "hybrid sum rate   {:.6e} bit/s", sum.value)?;
                writeln!(out, "hybrid EE         {:.6e} bit/J", ee.value)?;
                writeln!(out, "vlc-only EE       {:.6e} bit/J", vo.value)?;
            }
        }
        Command::Sweep {
            link,
            param,
            from,
            to,
            steps,
            scale,
            modes: mode_list,
            methods: method_list,
            out: path,
        } => {
            let param: SweepParam = param.parse()?;
            let scale: Scale = scale.parse()?;
            let spec = SweepSpec::new(param, from, to, steps, scale)?;
            let rows = run_sweep(&s, link.parse()?, &spec, &modes(&mode_list)?, &methods(&method_list)?);
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("warning: {} = {}: {}", r.param, r.value, r.error.as_deref().unwrap_or(""));
            }
            match path {
                Some(p) => {
                    let mut buf = Vec::new();
                    write_csv(&mut buf, &rows)?;
                    std::fs::write(p, buf)?;
                }
                None => write_csv(&mut out, &rows)?,
            }
        }
        Command::Reproduce {
            figure,
            out: dir,
            methods: method_list,
        } => {
            let ids: Vec<FigureId> = if figure == "all" {
                FigureId::all().collect()
            } else {
                vec![figure.parse()?]
            };
            let ms = methods(&method_list)?;
            for id in ids {
                for p in reproduce_figure(&s, id, &dir, &ms)? {
                    writeln!(out, "{}", p.display())?;
                }
            }
        }
        Command::Selftest => selftest::run(&mut out, s.mc.trials, s.mc.seed)?,
        Command::Config => {
            write!(out, "{}", s.echo())?;
            writeln!(out, "# config digest {}", s.digest())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
