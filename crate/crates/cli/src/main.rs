use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xpol_dm_cli::commands;

/// Directional modulation weight synthesis for crossed-dipole linear arrays.
#[derive(Parser)]
#[command(name = "xpol-dm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the weight bank for every composite symbol.
    Synthesize {
        #[arg(long)]
        config: PathBuf,
        /// Bank file to write; defaults to outputs.bank in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed of the random sidelobe phases.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export beam and phase patterns of a bank as CSV.
    Evaluate {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Plot-angle step in degrees; defaults to sweep_step_deg in the config, then 1.
        #[arg(long)]
        step: Option<f64>,
        /// CSV file to write; defaults to outputs.patterns in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Composite symbols, as labels ("00,11") or indices ("2"). Default: all.
        #[arg(long, num_args = 1..)]
        symbols: Vec<String>,
    },
    /// Reproduce the built-in 19-element QPSK example into a directory.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), xpol_dm_cli::CliError> {
    match cli.command {
        Command::Synthesize { config, out, seed } => {
            let result = commands::synthesize(&config, out.as_deref(), seed);
            if let Ok(s) = &result {
                print!("{}", s.objective_table());
                println!("max constraint residual: {:.3e}", s.max_constraint_residual());
                println!("max projected gradient: {:.3e}", s.max_stationarity);
            }
            result.map(|_| ())
        }
        Command::Evaluate {
            bank,
            config,
            step,
            out,
            symbols,
        } => {
            let e = commands::evaluate(&bank, &config, step, out.as_deref(), &symbols)?;
            println!(
                "wrote {} rows for {} symbol(s) to {}",
                e.rows,
                e.symbols.len(),
                e.output.display()
            );
            Ok(())
        }
        Command::Demo { out } => {
            let d = commands::demo(&out)?;
            print!("{}", d.summary);
            for f in &d.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
