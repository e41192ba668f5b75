//! `gpi`: runs the oracle, centralized, distributed and Monte Carlo
//! experiments and writes their traces as CSV/JSON.

mod args;
mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{GraphSource, RunArgs};

#[derive(Debug, Parser)]
#[command(
    name = "gpi",
    version,
    about = "Generalized algebraic connectivity of weighted digraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigendecomposition reference: GAC, dominant kind and spectra.
    Oracle {
        #[command(flatten)]
        source: GraphSource,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_name = "DIR")]
        out: Option<std::path::PathBuf>,
    },
    /// Centralized power iteration.
    Centralized {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        run: RunArgs,
        /// Also report the error against the eigendecomposition reference.
        #[arg(long)]
        with_oracle: bool,
    },
    /// Distributed iteration on the simulated network.
    Distributed {
        #[command(flatten)]
        source: GraphSource,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        dist: commands::DistArgs,
    },
    /// Round-count scaling over random digraphs.
    Montecarlo(commands::MonteCarloArgs),
    /// Writes a random strongly connected digraph.
    Gen {
        #[arg(value_name = "N,PROB,SEED", value_parser = args::parse_gen)]
        spec: args::GenSpec,
        #[arg(long, value_enum, default_value = "csv")]
        format: commands::GraphFormat,
        /// Output file; standard output when omitted.
        #[arg(long, value_name = "PATH")]
        output: Option<std::path::PathBuf>,
    },
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn non_convergence(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit with 1; clap's own code 2 is reserved for non-convergence.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Oracle { source, delta, out } => commands::oracle(&source, delta, out.as_deref()),
        Command::Centralized {
            source,
            run,
            with_oracle,
        } => commands::centralized(&source, &run, with_oracle),
        Command::Distributed { source, run, dist } => commands::distributed(&source, &run, &dist),
        Command::Montecarlo(mc) => commands::montecarlo(&mc),
        Command::Gen {
            spec,
            format,
            output,
        } => commands::generate(spec, format, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
