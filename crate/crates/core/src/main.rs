use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twophoton::scenario::{self, RunError};

/// Environment variable overriding the worker thread count.
const THREADS_ENV: &str = "TWOPHOTON_THREADS";

#[derive(Parser)]
#[command(name = "twophoton", version, about = "Time-resolved two-photon interference scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV files and manifest.json.
    Run {
        config: PathBuf,
        /// Output directory (overrides `output` in the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
}

fn configure_threads() {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: could not set {THREADS_ENV}={n}: {e}");
            }
        }
        _ => eprintln!("warning: ignoring {THREADS_ENV}={value:?} (expected a positive integer)"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Run { config, out } => scenario::run(&config, out.as_deref()).map(|m| {
            for f in &m.files {
                println!("wrote {} ({} bytes, sha256 {})", f.name, f.bytes, f.sha256);
            }
            println!("wrote manifest.json");
        }),
        Command::Validate { config } => scenario::validate(&config).and_then(|issues| {
            for issue in &issues {
                println!("{issue}");
            }
            println!("{} issues", issues.len());
            if issues.is_empty() {
                Ok(())
            } else {
                Err(RunError::Invalid(Vec::new()))
            }
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Invalid(issues)) if issues.is_empty() => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
