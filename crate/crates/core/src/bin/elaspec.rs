//! Command-line front end: experiments are described by plain-text config
//! files (archivable, hashed into every artifact); flags only carry paths
//! and verbosity.

use clap::{Parser, Subcommand};
use elaspec::cli::{
    run_kernel, run_plotdata, run_report, run_spectrum, run_symbol, run_verify, ExperimentConfig,
};
use elaspec::error::Result;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "elaspec",
    about = "Elastic spectra, heat-trace and counting-function asymptotics, symbol calculus, and image kernels on canonical domains",
    version
)]
struct Cli {
    /// Experiment configuration file (key = value lines).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured output directory.
    #[arg(short, long, global = true)]
    output_dir: Option<String>,

    /// Suppress the artifact listing.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an eigenvalue table (CSV + JSON + certification record).
    Spectrum,
    /// Evaluate 1D image heat kernels and their traces.
    Kernel,
    /// Emit the resolvent symbol report (q_{-4} terms, parity, homogeneity).
    Symbol,
    /// Run the full verification pipeline: theory vs fitted coefficients.
    Verify,
    /// Derive plot-ready CSVs from verify outputs.
    Plotdata,
    /// Print a text summary of a verify run.
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            elaspec::error::Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?,
        None => String::new(),
    };
    let mut text = text;
    if let Some(dir) = &cli.output_dir {
        // The flag overrides any configured output directory.
        text = text
            .lines()
            .filter(|l| !l.trim_start().starts_with("output_dir"))
            .collect::<Vec<_>>()
            .join("\n");
        text.push_str(&format!("\noutput_dir = {dir}\n"));
    }
    ExperimentConfig::from_text(&text)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let artifacts = match cli.command {
        Command::Spectrum => run_spectrum(&cfg)?,
        Command::Kernel => run_kernel(&cfg)?,
        Command::Symbol => run_symbol(&cfg)?,
        Command::Verify => run_verify(&cfg)?,
        Command::Plotdata => run_plotdata(&cfg)?,
        Command::Report => {
            print!("{}", run_report(&cfg)?);
            return Ok(());
        }
    };
    if !cli.quiet {
        for a in artifacts {
            println!("{}", a.display());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
