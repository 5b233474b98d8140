//! Verification laboratory for two-term spectral asymptotics of the
//! Navier-Lame operator of linear elasticity on flat 2D domains.
//!
//! The crate computes elastic spectra by two independent routes (Bessel
//! dispersion relations and a plane-strain finite-element solver), evaluates
//! the closed-form heat-trace and counting-function coefficients, extracts
//! empirical coefficients from the computed spectra, and implements the
//! flat-metric resolvent symbol calculus and image-method kernels behind the
//! asymptotic formulas.
//!
//! Pipeline shape: `exact` / `fem` produce certified [`spectrum::SpectrumTable`]s,
//! `asymptotics` turns them into partition functions, counting functions,
//! fitted coefficients, and comparison reports; `symbol` and `kernels`
//! verify the analytic ingredients independently. The `elaspec` binary wires
//! these into reproducible experiment artifacts.

// openblas-src provides the BLAS/LAPACK link line for lapack-sys/cblas-sys.
extern crate openblas_src as _openblas;

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fem;
pub mod kernels;
pub mod moduli;
pub mod output;
pub mod special;
pub mod spectrum;
pub mod symbol;

pub use error::{Error, Result};
pub use moduli::ElasticModuli;
pub use spectrum::{BoundaryCondition, SpectrumSource, SpectrumTable};
