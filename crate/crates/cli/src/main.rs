use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eddeec::{load_spec, EmitFlags, Error, Overrides, ProtocolKind, RadioProfile};

/// Exit status for configuration and validation failures.
const EXIT_VALIDATION: u8 = 1;
/// Exit status for file-system failures.
const EXIT_IO: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "eddeec", version, about = "DEEC-family clustering simulator for heterogeneous sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every (protocol, seed) pair of an experiment file and write its artifacts.
    Run {
        /// Experiment file (TOML).
        spec: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Number of replications derived from `seeds.base`.
        #[arg(long)]
        seed_count: Option<usize>,
        /// Comma-separated subset of deec,ddeec,edeec,eddeec.
        #[arg(long, value_delimiter = ',')]
        protocols: Option<Vec<String>>,
        /// Radio constants: table1-verbatim or leach-standard.
        #[arg(long)]
        profile: Option<String>,
        /// Comma-separated subset of csv,svg,summary.
        #[arg(long, value_delimiter = ',')]
        emit: Option<Vec<String>>,
        /// Do not print the summary table.
        #[arg(long, short)]
        quiet: bool,
    },
}

fn exit_code(err: &Error) -> u8 {
    if err.is_io() {
        EXIT_IO
    } else {
        EXIT_VALIDATION
    }
}

fn run(command: Command) -> Result<(), Error> {
    let Command::Run {
        spec,
        output_dir,
        seed_count,
        protocols,
        profile,
        emit,
        quiet,
    } = command;

    let mut experiment = load_spec(&spec)?;
    let overrides = Overrides {
        output_dir,
        seed_count,
        protocols: protocols
            .map(|list| list.iter().map(|s| s.parse::<ProtocolKind>()).collect())
            .transpose()?,
        profile: profile.map(|p| p.parse::<RadioProfile>()).transpose()?,
        emit: emit.map(|list| EmitFlags::parse(&list)).transpose()?,
    };
    experiment.apply_overrides(&overrides)?;

    let report = eddeec::experiment::run_experiment(&experiment)?;
    if !quiet {
        print!("{}", eddeec::metrics::render_summary_text(&report.batches));
        for path in &report.written {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
