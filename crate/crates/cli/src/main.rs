//! `stlf`: batch front end for monitoring, covering arrays, falsification
//! campaigns and robustness heatmaps.
//!
//! Exit codes: 0 satisfied / not falsified, 1 falsified, 2 inconclusive,
//! 3 any error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

const EXIT_ERROR: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "stlf", version, about = "STL falsification toolkit")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent simulations (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Robustness of a formula on a trace.
    Monitor {
        /// Formula text.
        #[arg(
            long,
            conflicts_with = "formula_file",
            required_unless_present = "formula_file"
        )]
        formula: Option<String>,
        /// File holding the formula text.
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Trace CSV; its JSON sidecar is used when present.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Covering array from a JSON parameter spec.
    GenerateCa {
        #[arg(long, alias = "config")]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Falsification campaign.
    Falsify {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Covering array for `ca+sa`; overrides `search.ca_file`.
        #[arg(long)]
        ca: Option<PathBuf>,
    },
    /// Robustness over a grid of the two free search variables.
    Heatmap {
        #[arg(long)]
        config: PathBuf,
        /// Matrix CSV; axes go to the JSON sidecar.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
    },
    /// Runs the scenario once and writes the raw trace.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("STLF_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    let result = match cli.command {
        Command::Monitor {
            formula,
            formula_file,
            trace,
        } => commands::monitor(formula, formula_file, &trace),
        Command::GenerateCa { spec, out } => commands::generate_ca(&spec, cli.seed, &out),
        Command::Falsify { config, out, ca } => commands::falsify(&config, cli.seed, &out, ca),
        Command::Heatmap {
            config,
            out,
            rows,
            cols,
        } => commands::heatmap(&config, &out, rows, cols),
        Command::Simulate { config, out } => commands::simulate(&config, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
