//! Error taxonomy shared across the crate.
//!
//! The CLI maps these onto process exit codes: configuration problems exit
//! with 1, numerical failures with 2, and spectrum-certification failures
//! with 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration, argument, or input file.
    #[error("config error: {0}")]
    Config(String),

    /// Argument outside the supported range of a special function or table.
    #[error("range error: {0}")]
    Range(String),

    /// Mesh generation or validation failed.
    #[error("mesh error: {0}")]
    Mesh(String),

    /// Element assembly failed; carries the offending triangle index.
    #[error("assembly error on triangle {triangle}: {reason}")]
    Assembly { triangle: usize, reason: String },

    /// Matrix factorization failed (e.g. mass matrix not positive definite).
    #[error("factorization error: {0}")]
    Factorization(String),

    /// Evaluation too close to a resolvent pole.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// Numerical differentiation backend failed; carries the step report.
    #[error("numeric-differentiation error (step {step:e}): {reason}")]
    Differentiation { step: f64, reason: String },

    /// Quadrature did not reach the requested tolerance.
    #[error("integration error: achieved {achieved:e}, requested {requested:e}")]
    Integration { achieved: f64, requested: f64 },

    /// Least-squares design matrix is ill conditioned.
    #[error("fit error: {0}")]
    Fit(String),

    /// Root scan could not certify completeness of a spectrum table.
    #[error(
        "incomplete-spectrum error: certification failed on tau in [{suspect_lo}, {suspect_hi}] ({detail})"
    )]
    IncompleteSpectrum {
        suspect_lo: f64,
        suspect_hi: f64,
        detail: String,
    },

    /// Generic numerical failure.
    #[error("numeric error: {0}")]
    Numerics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code for the CLI: 1 = config, 2 = numerics, 3 = certification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Range(_) => 1,
            Error::IncompleteSpectrum { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
