use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use predfront_cli::{load_config, run, CliError, Mode, RunOptions, RunOutcome};

#[derive(Parser)]
#[command(name = "predfront", version, about = "Predator-prey free-boundary simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `outputs.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for bisect and sweep.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
    /// Reject machine-dependent defaults such as the worker count.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run one simulation and classify it.
    Simulate,
    /// Bracket the spreading threshold in μ.
    Bisect,
    /// Classify a one- or two-parameter grid.
    Sweep,
    /// Solve the logistic two-point problem.
    Steady,
    /// Print the limit iteration and its targets.
    Limits,
}

impl Command {
    fn mode(self) -> Mode {
        match self {
            Command::Simulate => Mode::Simulate,
            Command::Bisect => Mode::Bisect,
            Command::Sweep => Mode::Sweep,
            Command::Steady => Mode::Steady,
            Command::Limits => Mode::Limits,
        }
    }
}

fn execute(cli: &Cli) -> Result<RunOutcome, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let cfg = load_config(path)?;
    let opts = RunOptions { out: cli.out.clone(), workers: cli.workers, seedless: cli.seedless };
    run(&cfg, cli.command.mode(), &opts)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(o) => {
            println!("{}", o.report);
            println!("artifacts in {}", o.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
