use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod output;

/// Synthesize, verify and train small ReLU networks for indicator functions
/// of polytopal sets.
#[derive(Debug, Parser)]
#[command(name = "polynet", version, propagate_version = true)]
struct Cli {
    /// Seed for every random stream used by the command.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the summary as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for output files and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an indicator network from a geometry file.
    Build(commands::build::Args),
    /// Closed-form width bounds and Betti-number architectures.
    Bound(commands::bound::Args),
    /// Check a network against a geometry on stratified samples.
    Verify(commands::verify::Args),
    /// Full-batch gradient descent from a JSON config.
    Train(commands::train::Args),
    /// Riemann-sum approximator of a Lipschitz function on the unit cube.
    Approx(commands::approx::Args),
}

/// Global options shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub json: bool,
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, bad configuration.
    Input(String),
    Construct(String),
    Verify(String),
    Diverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Construct(_) => 3,
            Failure::Verify(_) => 4,
            Failure::Diverged(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m)
            | Failure::Construct(m)
            | Failure::Verify(m)
            | Failure::Diverged(m) => m,
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("POLYNET_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            Failure::Input(format!(
                "POLYNET_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        json: cli.json,
        out: cli.out,
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Build(a) => commands::build::run(&ctx, a),
        Command::Bound(a) => commands::bound::run(&ctx, a),
        Command::Verify(a) => commands::verify::run(&ctx, a),
        Command::Train(a) => commands::train::run(&ctx, a),
        Command::Approx(a) => commands::approx::run(&ctx, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("polynet: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
