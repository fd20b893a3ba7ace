use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ermlab::capacity::DEFAULT_VC_SIZE_CAP;
use ermlab::cli::{self, config::parse_bound_mode, PlotKind};
use ermlab::LabError;

/// Finite-class ERM lab.
#[derive(Parser)]
#[command(name = "ermlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Render a CSV artifact as SVG.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Log-scale time axis (scaling plots).
        #[arg(long)]
        log: bool,
    },
    /// Run a built-in fixture: tradeoff, no-tradeoff, interpretability-wins or fact-suite.
    Scenario { name: String },
    /// Evaluate a VC generalization bound.
    Bounds {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value = "paper")]
        mode: String,
        #[arg(long, default_value_t = 2.0)]
        constant: f64,
    },
    /// Brute-force VC dimension of a class.
    Vc {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_depth: Option<usize>,
        /// Repeatable, e.g. `max_literals:1`.
        #[arg(long)]
        predicate: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_VC_SIZE_CAP)]
        size_cap: usize,
    },
}

fn execute(cmd: Command) -> Result<bool, LabError> {
    match cmd {
        Command::Run { config } => {
            let (dir, manifest) = cli::run(&config)?;
            for o in &manifest.outputs {
                println!("{}", dir.join(o).display());
            }
            println!("{}", dir.join(cli::MANIFEST_FILE).display());
        }
        Command::Plot { csv, kind, out, log } => cli::plot_file(&csv, PlotKind::parse(&kind)?, log, &out)?,
        Command::Scenario { name } => {
            let outcome = cli::scenario(&name)?;
            for line in outcome.lines() {
                println!("{line}");
            }
            return Ok(outcome.succeeded());
        }
        Command::Bounds { d, m, delta, mode, constant } => {
            println!("{}", cli::bounds_report(d, m, delta, parse_bound_mode(&mode, constant)?)?);
        }
        Command::Vc { family, n, max_depth, predicate, size_cap } => {
            let class = cli::class_from_flags(&family, n, max_depth, &predicate)?;
            println!("{}", cli::vc_report(&class, size_cap)?);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
