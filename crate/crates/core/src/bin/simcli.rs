use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cpbsim::experiment::{load_config, plot, run_config_file};
use cpbsim::Error;

/// Worker-count override for the rayon pool.
const WORKERS_ENV: &str = "SIMCLI_WORKERS";

#[derive(Parser)]
#[command(name = "simcli", version, about = "Run charge-qubit circuit experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate and run every experiment in a config file.
    Run { config: PathBuf },
    /// Parse and validate a config file without computing anything.
    Validate { config: PathBuf },
    /// Render SVG plots from the CSV files of a result directory.
    Plot { result_dir: PathBuf },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 1,
        _ => 2,
    }
}

fn init_workers() -> Result<(), Error> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(vec![format!("{WORKERS_ENV}: expected a positive integer, got '{v}'")]))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Io(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Error> {
    init_workers()?;
    match cli.command {
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            println!("{}: ok ({} experiment(s))", config.display(), cfg.experiment.len());
        }
        Command::Run { config } => {
            let outcomes = run_config_file(&config)?;
            if outcomes.is_empty() {
                println!("nothing to do");
            }
            for o in outcomes {
                println!("{} -> {} (config {})", o.name, o.directory.display(), &o.config_hash[..12]);
            }
        }
        Command::Plot { result_dir } => {
            for p in plot::render_dir(&result_dir)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("simcli: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
