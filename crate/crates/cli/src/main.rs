//! `sheafcode`: build sheaf codes from a JSON config, verify them and report
//! their parameters.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or config error.

mod commands;
mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::commands::Suite;
use crate::config::ConfigError;

#[derive(Parser)]
#[command(name = "sheafcode", version, about = "Sheaf codes on cubical and simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the complex, sheaf and CSS artifacts and print a summary.
    Build(Common),
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Report n, k, distance bounds and CCZ parameters.
    Params(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory for artifacts and reports.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn emit(v: &Value, out: Option<&Path>, name: &str) -> Result<Option<PathBuf>, ConfigError> {
    let text = serde_json::to_string_pretty(v).expect("json");
    println!("{text}");
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| ConfigError(format!("{}: {e}", dir.display())))?;
            let p = dir.join(name);
            fs::write(&p, text + "\n").map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
            Ok(Some(p))
        }
        None => Ok(None),
    }
}

fn run(cli: Cli) -> Result<u8, ConfigError> {
    let common = match &cli.command {
        Command::Build(c) | Command::Params(c) => c,
        Command::Verify { common, .. } => common,
    };
    let Format::Json = common.format;
    let (cfg, base) = config::load(&common.config)?;
    let out = common.out.clone().or_else(|| cfg.out.as_ref().map(|p| base.join(p)));
    let trials = common.trials.unwrap_or(cfg.trials);
    let inst = config::build(&cfg, &base)?;
    match cli.command {
        Command::Build(_) => {
            let summary = commands::build(&inst, out.as_deref())?;
            emit(&summary, out.as_deref(), "summary.json")?;
            Ok(0)
        }
        Command::Verify { suite, .. } => {
            let seed = config::resolve_seed(&cfg, common.seed)?;
            let (report, outcome) = commands::verify(&inst, suite, seed, trials)?;
            let path = emit(&report, out.as_deref(), "report.json")?;
            match outcome {
                Some(true) => Ok(0),
                Some(false) => {
                    match path {
                        Some(p) => eprintln!("verification failed; report at {}", p.display()),
                        None => eprintln!("verification failed"),
                    }
                    Ok(1)
                }
                None => Err(ConfigError("suite does not apply to this instance".into())),
            }
        }
        Command::Params(_) => {
            let seed = config::resolve_seed(&cfg, common.seed)?;
            let p = commands::params(&inst, &cfg, seed, trials)?;
            emit(&p, out.as_deref(), "params.json")?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
