use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mbchaos::harness::{preset, run_with_threads, write_csv, ExperimentConfig, PRESETS};
use mbchaos::{Error, Result};

#[derive(Parser)]
#[command(name = "mbchaos", version, about = "Ensemble runs of the TBRI and spin-chain models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file (or a preset given with --preset).
    Run(RunArgs),
    /// Run a named preset.
    Preset {
        /// Preset name (see `list-presets`).
        name: Option<String>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Print the known presets.
    ListPresets,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file (`key = value` lines plus a `[model]` section).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset to run when no --config is given.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed; overrides the file value.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of realizations; overrides the file value.
    #[arg(long)]
    realizations: Option<usize>,
    /// Main CSV path. Companion tables and the `.meta` sidecar go next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    threads: Option<usize>,
}

fn resolve(args: &RunArgs, positional: Option<&str>) -> Result<(ExperimentConfig, Option<String>)> {
    let preset_name = match (positional, args.preset.as_deref()) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Config(format!("conflicting presets `{a}` and `{b}`")))
        }
        (Some(a), _) => Some(a.to_string()),
        (None, b) => b.map(String::from),
    };
    let mut cfg = match (&args.config, &preset_name) {
        (Some(path), _) => ExperimentConfig::from_path(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(Error::Config("give --config or --preset".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(r) = args.realizations {
        cfg.realizations = r;
    }
    cfg.validate()?;
    Ok((cfg, preset_name))
}

fn execute(args: RunArgs, positional: Option<&str>) -> Result<()> {
    let (cfg, name) = resolve(&args, positional)?;
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", name.as_deref().unwrap_or("run"))));
    let result = run_with_threads(&cfg, name.as_deref(), threads)?;
    for path in write_csv(&result, &out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::ListPresets => {
            for (name, description) in PRESETS {
                println!("{name:<14} {description}");
            }
            Ok(())
        }
        Command::Run(args) => execute(args, None),
        Command::Preset { name, args } => execute(args, name.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
