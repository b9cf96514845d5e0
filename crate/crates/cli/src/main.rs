//! `bcsgp`: config-driven runs of the two-body, GP and BCS trial-state studies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use bcsgp::Exec;
use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{error_kind, Command, Failure};
use config::{load_config, ConfigError, RunConfig};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "bcsgp", version, about = "BCS to Gross-Pitaevskii numerical studies")]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dotted override such as `model.h=0.2` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Monte Carlo seed (overrides `mc.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Ground state, gap, moments and pairing coefficient of the pair problem.
    Twobody,
    /// GP minimizer, GL splitting and criticality scan.
    Gp,
    /// Energy breakdown of the trial state at a single `h`.
    TrialEnergy {
        #[arg(long)]
        h: Option<f64>,
    },
    /// Residual sweep over `model.h_list` and power-law fit.
    Sweep,
    /// Critical offset of the trial family at each `h`.
    MuC {
        /// Scale ratios (repeatable); defaults to `critical.h_values`.
        #[arg(long)]
        h: Vec<f64>,
    },
    /// Oracle and invariant suite.
    Verify,
    /// Export the versioned oracle table.
    OracleTable,
}

fn overrides(cli: &Cli) -> Vec<String> {
    let mut o = cli.overrides.clone();
    if let Some(d) = &cli.out {
        o.push(format!("output.dir={}", toml::Value::String(d.display().to_string())));
    }
    if let Some(s) = cli.seed {
        o.push(format!("mc.seed={s}"));
    }
    if let Some(t) = cli.threads {
        o.push(format!("threads={t}"));
    }
    match &cli.command {
        Cmd::TrialEnergy { h: Some(h) } => o.push(format!("model.h={h:?}")),
        Cmd::MuC { h } if !h.is_empty() => {
            let list: Vec<String> = h.iter().map(|x| format!("{x:?}")).collect();
            o.push(format!("critical.h_values=[{}]", list.join(",")));
        }
        _ => {}
    }
    o
}

fn command(cmd: &Cmd) -> Command {
    match cmd {
        Cmd::Twobody => Command::TwoBody,
        Cmd::Gp => Command::Gp,
        Cmd::TrialEnergy { .. } => Command::TrialEnergy,
        Cmd::Sweep => Command::Sweep,
        Cmd::MuC { .. } => Command::MuC,
        Cmd::Verify => Command::Verify,
        Cmd::OracleTable => Command::OracleTable,
    }
}

fn execute(cmd: Command, config: &RunConfig, exec: Exec, threads: usize) -> Report {
    let mut report = Report::new(cmd.name(), config, threads);
    match commands::run(cmd, config, exec, &mut report) {
        Ok(()) => {}
        Err(Failure::Numerics(e)) => {
            let code = if e.is_numerical() { 2 } else { 1 };
            let detail = serde_json::to_value(format!("{e:?}")).unwrap_or_default();
            report.fail(code, error_kind(&e), e.to_string(), json!({ "debug": detail }));
        }
        Err(Failure::Checks(n)) => {
            report.fail(1, "checks-failed", format!("{n} verification checks failed"), json!({ "failures": n }));
        }
    }
    report
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cmd = command(&cli.command);
    let config = match load_config(cli.config.as_deref(), &overrides(&cli)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            let kind = match e {
                ConfigError::Io { .. } => "io",
                ConfigError::Parse(_) | ConfigError::Override(_) => "parse",
                ConfigError::Invalid(_) => "validation",
            };
            println!("{}", json!({ "status": "error", "error": { "kind": kind, "message": e.to_string() } }));
            return ExitCode::from(1);
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    let threads = pool.current_num_threads();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let report = pool.install(|| execute(cmd, &config, exec, threads));

    let dir = PathBuf::from(&config.output.dir);
    match report.write(&dir) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: cannot write report to {}: {e}", dir.display());
            return ExitCode::from(1);
        }
    }
    if let Some(err) = &report.error {
        eprintln!("{} failed: {}", cmd.name(), err["message"].as_str().unwrap_or_default());
    } else {
        eprintln!("{} ok", cmd.name());
    }
    ExitCode::from(report.exit_code as u8)
}
