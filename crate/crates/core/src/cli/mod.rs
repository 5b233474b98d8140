//! Experiment orchestration: configuration files, subcommands, and
//! deterministic output artifacts.

mod commands;
mod config;

pub use commands::{run_kernel, run_plotdata, run_report, run_spectrum, run_symbol, run_verify};
pub use config::{Domain, ExperimentConfig, LambdaWindow, Method, TGrid};
