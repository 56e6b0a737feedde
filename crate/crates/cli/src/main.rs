// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod manifest;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::Command;
use error::{param, CliError};
use manifest::RunManifest;
use output::RunDir;

/// Environment variable naming the output root.
const OUT_DIR_ENV: &str = "STWPA_OUT_DIR";
const DEFAULT_OUT_ROOT: &str = "stwpa-out";

#[derive(Debug, Parser)]
#[command(
    name = "stwpa",
    version,
    about = "Solitons and analogue horizons on a SNAIL transmission line"
)]
struct Cli {
    #[command(subcommand)]
    command: TopCommand,
    /// Output root; defaults to $STWPA_OUT_DIR, then ./stwpa-out.
    #[arg(long, global = true)]
    out_root: Option<PathBuf>,
    /// Run directory below the output root; defaults to the subcommand name.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fan out over a parameter: key=v1,v2,... or key=start:stop:count.
    /// Repeat for a grid.
    #[arg(long, global = true, value_name = "KEY=VALUES")]
    sweep: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum TopCommand {
    #[command(flatten)]
    Run(Command),
    /// Rerun the experiment recorded in a manifest.
    Replay {
        /// Path to a manifest.json written by an earlier run.
        manifest: PathBuf,
    },
}

fn out_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
    .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT))
}

/// One run into `dir`; `name` is recorded in the manifest.
fn run_single(command: &Command, dir: PathBuf, name: PathBuf) -> Result<Value, CliError> {
    let manifest = RunManifest::new(command, name)?;
    let mut out = RunDir::create(dir, &manifest)?;
    log::info!("{} -> {}", manifest.subcommand, out.path().display());
    let mut summary = command.run(&mut out)?;
    let (dir, outputs) = out.finish(manifest)?;
    if let Value::Object(m) = &mut summary {
        m.insert("run_dir".into(), json!(dir));
        m.insert("outputs".into(), json!(outputs));
    }
    Ok(summary)
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let root = out_root(cli.out_root);
    let (command, default_name) = match cli.command {
        TopCommand::Run(c) => {
            let name = PathBuf::from(c.name());
            (c, name)
        }
        TopCommand::Replay { manifest } => {
            if !cli.sweep.is_empty() {
                return Err(param("--sweep cannot be combined with replay"));
            }
            let m = RunManifest::load(&manifest)?;
            (m.replay_command()?, m.run_dir)
        }
    };
    let name = cli.out.unwrap_or(default_name);
    let dir = root.join(&name);

    if cli.sweep.is_empty() {
        let summary = run_single(&command, dir, name)?;
        print(&summary);
        return Ok(0);
    }
    let axes = cli
        .sweep
        .iter()
        .map(|s| sweep::parse_axis(s))
        .collect::<Result<Vec<_>, _>>()?;
    let runs = sweep::expand(&command, &axes)?;
    let (index, worst) = sweep::run(runs, &dir, &name, run_single)?;
    print(&index);
    Ok(worst)
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("summary serializes"));
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
