use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ranpower::config::{load_config, RunConfig};
use ranpower::runner;
use ranpower::Error;

/// Dense-RAN downlink power management simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat key = value configuration file; omitted keys use defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppresses progress output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One run of the configured agent.
    Run(Common),
    /// DQN, Q-learning and sleep scheme on the same configuration and seed.
    Compare(Common),
    /// Cartesian product over the given keys, run in parallel.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Axis as key=v1,v2,... (repeatable).
        #[arg(long = "set", required = true)]
        axes: Vec<String>,
    },
    /// Compares the configured agent with exhaustive search on a small instance.
    Oracle(Common),
}

fn setup(c: &Common) -> Result<(RunConfig, PathBuf), Error> {
    let mut cfg = match &c.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    let out = runner::resolve_out(&cfg, c.out.clone());
    cfg.out_dir = out.clone();
    Ok((cfg, out))
}

fn exec(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(c) => {
            let (cfg, out) = setup(&c)?;
            let s = runner::run(&cfg, &out, c.quiet)?;
            if !c.quiet {
                println!("{}", serde_json::to_string_pretty(&s.overall)?);
            }
        }
        Command::Compare(c) => {
            let (cfg, out) = setup(&c)?;
            for s in runner::compare(&cfg, &out, c.quiet)? {
                if !c.quiet {
                    println!("{:<10} ee={:.6} success={:?} iterations={:?}", s.agent, s.overall.ee, s.overall.success_ratio, s.overall.iterations);
                }
            }
        }
        Command::Sweep { common, axes } => {
            let (cfg, out) = setup(&common)?;
            let axes = axes.iter().map(|a| runner::parse_axis(a)).collect::<Result<Vec<_>, _>>()?;
            let n = runner::sweep(&cfg, &axes, &out, common.quiet)?.len();
            if !common.quiet {
                println!("{n} runs written to {}", out.display());
            }
        }
        Command::Oracle(c) => {
            let (cfg, out) = setup(&c)?;
            let r = runner::oracle(&cfg, &out, c.quiet)?;
            if !c.quiet {
                println!("{}", serde_json::to_string_pretty(&r)?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match exec(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::Validation { .. } | Error::InvalidConfig(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
