use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qoc_cli::commands::{
    cmd_controllability, cmd_optimize, cmd_propagate, cmd_scan, resolve_out_dir, RunContext,
};
use qoc_cli::config::LoadedConfig;
use qoc_cli::CliError;

/// Batch synthesis of control pulses for open quantum systems.
#[derive(Parser)]
#[command(name = "qoc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent sub-tasks; 0 = auto. The QOC_THREADS
    /// environment variable, when set, overrides this flag.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Print progress to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate an initial state and export the trajectory + observables.
    Propagate(CommonArgs),
    /// Run the iterative pulse optimization.
    Optimize(CommonArgs),
    /// Optimize over a list of durations and tabulate fidelity vs time.
    Scan(CommonArgs),
    /// Lie-rank and connectivity analysis of the control Hamiltonians.
    Controllability(CommonArgs),
}

fn effective_threads(flag: usize) -> Result<usize, CliError> {
    match std::env::var("QOC_THREADS") {
        Err(_) => Ok(flag),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("QOC_THREADS must be an integer, got {v:?}"))),
    }
}

fn run(
    args: &CommonArgs,
    f: impl Fn(&LoadedConfig, &RunContext) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let loaded = LoadedConfig::from_path(&args.config)?;
    let out_dir = resolve_out_dir(&loaded, args.out.as_deref())?;
    let ctx = RunContext {
        out_dir,
        threads: effective_threads(args.threads)?,
        verbose: args.verbose,
    };
    f(&loaded, &ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Propagate(args) => run(args, cmd_propagate),
        Command::Optimize(args) => run(args, cmd_optimize),
        Command::Scan(args) => run(args, cmd_scan),
        Command::Controllability(args) => run(args, cmd_controllability),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
