//! High-level FEM spectrum computation: mesh, assemble, solve, and certify
//! the reliable range by Richardson comparison against a coarser mesh.

use super::assemble::assemble;
use super::eigen::{solve_eigen_raw, table_from_values};
use super::mesh::{generate_disk_mesh, generate_square_mesh, ElementOrder, Mesh};
use crate::error::Result;
use crate::moduli::ElasticModuli;
use crate::spectrum::{BoundaryCondition, SpectrumTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FemDomain {
    Disk { radius: f64 },
    Square { side: f64 },
}

impl FemDomain {
    pub fn mesh(&self, h: f64, order: ElementOrder) -> Result<Mesh> {
        match *self {
            FemDomain::Disk { radius } => generate_disk_mesh(radius, h, order),
            FemDomain::Square { side } => generate_square_mesh(side, h, order),
        }
    }
}

/// Spectrum on one mesh plus a coarser companion (h * sqrt(2)); the
/// certification edge is the largest eigenvalue whose Richardson-style
/// error estimate stays below 1%.
pub struct FemSpectrum {
    pub table: SpectrumTable,
    pub coarse_values: Vec<f64>,
    /// Relative discretization-error estimates per eigenvalue index.
    pub error_estimates: Vec<f64>,
    pub fine_dofs: usize,
}

pub fn elastic_fem_spectrum(
    moduli: &ElasticModuli,
    domain: FemDomain,
    bc: BoundaryCondition,
    h: f64,
    order: ElementOrder,
    count: usize,
) -> Result<FemSpectrum> {
    let mesh_fine = domain.mesh(h, order)?;
    let mesh_coarse = domain.mesh(h * 1.6, order)?;
    let prob_fine = assemble(moduli, &mesh_fine, bc)?;
    let prob_coarse = assemble(moduli, &mesh_coarse, bc)?;
    let count_fine = count.min(prob_fine.dof_map.len());
    let count_coarse = count_fine.min(prob_coarse.dof_map.len());
    let fine = solve_eigen_raw(&prob_fine, count_fine)?;
    let coarse = solve_eigen_raw(&prob_coarse, count_coarse)?;
    // Conservative estimate: |tau_f - tau_c| / (r^p - 1) with p = 2 (the
    // geometric boundary error bounds the rate from below even for P2);
    // at ratio 1.6 that divisor is 1.56, and using the bare difference
    // overestimates, which only makes the certification edge safer.
    let mut estimates = Vec::with_capacity(count_fine);
    for k in 0..count_fine {
        let est = if k < coarse.values.len() {
            (fine.values[k] - coarse.values[k]).abs()
        } else {
            f64::INFINITY
        };
        estimates.push(est);
    }
    let mut table = table_from_values(&fine.values, bc)?;
    // max_reliable: longest prefix with relative estimate <= 1%.
    let mut edge = 0.0f64;
    for (k, &tau) in fine.values.iter().enumerate() {
        let rel = if tau.abs() > 1e-9 {
            estimates[k] / tau.abs()
        } else {
            0.0 // exact zero modes
        };
        if rel <= 0.01 {
            edge = tau;
        } else {
            break;
        }
    }
    table.set_max_reliable(edge);
    Ok(FemSpectrum {
        table,
        coarse_values: coarse.values,
        error_estimates: estimates,
        fine_dofs: prob_fine.dof_map.len(),
    })
}

/// Per-eigenvalue extrapolation and observed convergence order over a mesh
/// sequence (three or more levels, geometric in h).
pub struct ConvergenceStudy {
    pub h_levels: Vec<f64>,
    /// `values[level][k]`
    pub values: Vec<Vec<f64>>,
    /// Richardson extrapolation from the two finest levels.
    pub extrapolated: Vec<f64>,
    /// Observed order per eigenvalue from the last three levels; NaN where
    /// the error sequence is non-monotone (flagged, not fatal).
    pub observed_order: Vec<f64>,
}

pub fn convergence_study(
    moduli: &ElasticModuli,
    domain: FemDomain,
    bc: BoundaryCondition,
    h_levels: &[f64],
    order: ElementOrder,
    count: usize,
) -> Result<ConvergenceStudy> {
    if h_levels.len() < 3 {
        return Err(crate::error::Error::Config(
            "convergence study needs at least 3 mesh levels".into(),
        ));
    }
    let mut values = Vec::new();
    for &h in h_levels {
        let mesh = domain.mesh(h, order)?;
        let prob = assemble(moduli, &mesh, bc)?;
        let sol = solve_eigen_raw(&prob, count.min(prob.dof_map.len()))?;
        values.push(sol.values);
    }
    let m = h_levels.len();
    let n_ev = values.iter().map(|v| v.len()).min().unwrap_or(0);
    let r = h_levels[m - 2] / h_levels[m - 1];
    let mut observed = Vec::with_capacity(n_ev);
    let mut extrapolated = Vec::with_capacity(n_ev);
    for k in 0..n_ev {
        let (v1, v2, v3) = (values[m - 3][k], values[m - 2][k], values[m - 1][k]);
        let (d12, d23) = (v2 - v1, v3 - v2);
        let p = if d12 * d23 > 0.0 && d23.abs() < d12.abs() {
            (d12 / d23).abs().ln() / r.ln()
        } else {
            f64::NAN // non-monotone error sequence: flagged, not fatal
        };
        observed.push(p);
        let p_eff = if p.is_finite() { p } else { 2.0 };
        let rp = r.powf(p_eff);
        extrapolated.push(v3 + (v3 - v2) / (rp - 1.0));
    }
    Ok(ConvergenceStudy {
        h_levels: h_levels.to_vec(),
        values,
        extrapolated,
        observed_order: observed,
    })
}
