use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use packet_entropy::scenario::{
    emit_csv, format_outcomes, format_sweep_summary, run_scenario, sweep, ScenarioConfig,
    SweepParam,
};
use packet_entropy::states::{sj_bounds, OracleCurve};
use packet_entropy::Error;

#[derive(Parser)]
#[command(
    name = "packet-entropy",
    version,
    about = "Wave-packet propagation with position/momentum entropy diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario, write its CSV and print the verification table.
    Run {
        config: PathBuf,
        /// Override the configured CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario and print the verification table only.
    Verify { config: PathBuf },
    /// Repeat a scenario across values of one state parameter.
    Sweep {
        config: PathBuf,
        /// gamma | q0 | p0 | relative_phase
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        /// Directory for the per-value CSV files (defaults to the configured
        /// CSV directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print closed-form oracle values.
    Oracle {
        curve: Curve,
        #[arg(long, visible_alias = "γ", default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p0: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 7)]
        precision: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Curve {
    CoherentSq,
    CoherentSp,
    CoherentCenter,
    SqueezedSigma2,
    SqueezedSigma2Tilde,
    #[value(alias = "squeezed_SJ")]
    SqueezedSj,
    #[value(alias = "SJ_bounds")]
    SjBounds,
    FreeSigma2,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

/// Returns whether every requested check passed.
fn execute(command: Command) -> packet_entropy::Result<bool> {
    match command {
        Command::Run { config, out } => {
            let cfg = ScenarioConfig::load(&config)?;
            let run = run_scenario(&cfg)?;
            let path = out
                .or_else(|| cfg.output.csv_path.clone())
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.name)));
            emit_csv(&run.reports, &path, cfg.output.precision)?;
            print!("{}", format_outcomes(&cfg.name, &run.outcomes));
            println!("wrote {} rows to {}", run.reports.len(), path.display());
            Ok(run.passed())
        }
        Command::Verify { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let run = run_scenario(&cfg)?;
            print!("{}", format_outcomes(&cfg.name, &run.outcomes));
            Ok(run.passed())
        }
        Command::Sweep {
            config,
            param,
            values,
            out_dir,
        } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            let param: SweepParam = param.parse()?;
            let base = cfg
                .output
                .csv_path
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.name)));
            cfg.output.csv_path = Some(match out_dir {
                Some(dir) => dir.join(base.file_name().unwrap_or(base.as_os_str())),
                None => base,
            });
            let members = sweep(&cfg, param, &values)?;
            for m in &members {
                let path = m
                    .config
                    .output
                    .csv_path
                    .as_ref()
                    .expect("sweep assigns paths");
                emit_csv(&m.run.reports, path, m.config.output.precision)?;
            }
            print!("{}", format_sweep_summary(param, &members));
            Ok(members.iter().all(|m| m.run.passed()))
        }
        Command::Oracle {
            curve,
            gamma,
            t,
            q0,
            p0,
            mass,
            precision,
        } => {
            let value = |c: OracleCurve| c.evaluate(t);
            let p = precision;
            match curve {
                Curve::SjBounds => {
                    let b = sj_bounds(gamma)?;
                    println!("min={:.p$} max={:.p$}", b.min, b.max);
                }
                Curve::CoherentSq => println!("{:.p$}", value(OracleCurve::CoherentSq)?),
                Curve::CoherentSp => println!("{:.p$}", value(OracleCurve::CoherentSp)?),
                Curve::CoherentCenter => {
                    println!("{:.p$}", value(OracleCurve::CoherentCenter { q0, p0 })?)
                }
                Curve::SqueezedSigma2 => {
                    println!("{:.p$}", value(OracleCurve::SqueezedSigma2 { gamma })?)
                }
                Curve::SqueezedSigma2Tilde => {
                    println!("{:.p$}", value(OracleCurve::SqueezedSigma2Tilde { gamma })?)
                }
                Curve::SqueezedSj => println!("{:.p$}", value(OracleCurve::SqueezedSj { gamma })?),
                Curve::FreeSigma2 => {
                    println!("{:.p$}", value(OracleCurve::FreeSigma2 { gamma, mass })?)
                }
            }
            Ok(true)
        }
    }
}
