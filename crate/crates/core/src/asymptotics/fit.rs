//! Least-squares extraction of asymptotic coefficients from computed
//! spectra: heat-trace fits in t and counting-function fits in Lambda.

use super::coefficients::{CoefficientKind, CoefficientSet};
use super::partition::HeatTraceSeries;
use crate::error::{Error, Result};
use crate::spectrum::SpectrumTable;
use nalgebra::{DMatrix, DVector};

const MAX_CONDITION: f64 = 1e10;

/// Weighted least squares of y against the given power basis in x:
/// returns (coefficients, 1-sigma uncertainties) with the covariance scaled
/// by the reduced chi-square of the residuals.
fn weighted_power_fit(
    x: &[f64],
    y: &[f64],
    sigma: &[f64],
    powers: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = x.len();
    let p = powers.len();
    if m < p + 2 {
        return Err(Error::Fit(format!(
            "need at least {} points for a {p}-term fit, got {m}",
            p + 2
        )));
    }
    let mut design = DMatrix::zeros(m, p);
    let mut rhs = DVector::zeros(m);
    for i in 0..m {
        let w = 1.0 / sigma[i].max(1e-300);
        for (j, &q) in powers.iter().enumerate() {
            design[(i, j)] = x[i].powf(q) * w;
        }
        rhs[i] = y[i] * w;
    }
    let normal = design.transpose() * &design;
    let sym = nalgebra::SymmetricEigen::new(normal.clone());
    let max_ev = sym.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let min_ev = sym.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    if !(min_ev > 0.0) || max_ev / min_ev > MAX_CONDITION {
        return Err(Error::Fit(format!(
            "design matrix condition number {:.2e} exceeds {MAX_CONDITION:.0e}; change the grid",
            max_ev / min_ev.max(1e-300)
        )));
    }
    let coeffs = normal
        .clone()
        .lu()
        .solve(&(design.transpose() * &rhs))
        .ok_or_else(|| Error::Fit("normal equations are singular".into()))?;
    // Residual-scaled covariance.
    let fitted = &design * &coeffs;
    let chi2: f64 = (0..m).map(|i| (rhs[i] - fitted[i]).powi(2)).sum();
    let dof = (m - p).max(1) as f64;
    let scale = chi2 / dof;
    let cov = normal
        .try_inverse()
        .ok_or_else(|| Error::Fit("covariance inversion failed".into()))?
        * scale;
    let unc: Vec<f64> = (0..p).map(|j| cov[(j, j)].max(0.0).sqrt()).collect();
    Ok((coeffs.iter().cloned().collect(), unc))
}

/// Fit t^{n/2} Z(t) against {1, sqrt(t)} or {1, sqrt(t), t}.
///
/// Weights are the inverse of (scaled tail bound + next-order model proxy);
/// the uncertainty is the diagonal of the covariance under that residual
/// model. Deterministic for fixed inputs.
pub fn fit_heat_coefficients(
    series: &HeatTraceSeries,
    n_dim: u32,
    num_terms: usize,
) -> Result<CoefficientSet> {
    if !(num_terms == 2 || num_terms == 3) {
        return Err(Error::Fit("num_terms must be 2 or 3".into()));
    }
    let pts: Vec<(f64, f64, f64)> = series.usable_points().collect();
    if pts.len() < 10 {
        return Err(Error::Fit(format!(
            "usable grid has {} points; need >= 10",
            pts.len()
        )));
    }
    let span = pts.last().unwrap().0 / pts.first().unwrap().0;
    if span < 10.0 {
        return Err(Error::Fit(format!(
            "usable grid spans factor {span:.2}; need at least one decade"
        )));
    }
    let half = n_dim as f64 / 2.0;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut sigma = Vec::new();
    for (t, z, tb) in &pts {
        let scale = t.powf(half);
        let yv = scale * z;
        x.push(*t);
        y.push(yv);
        // tail error mapped to y-units plus the first dropped power of the
        // expansion as a model-error proxy.
        let proxy = yv.abs() * t.powf(num_terms as f64 / 2.0);
        sigma.push(scale * tb + proxy);
    }
    let powers: Vec<f64> = (0..num_terms).map(|k| k as f64 / 2.0).collect();
    let (c, u) = weighted_power_fit(&x, &y, &sigma, &powers)?;
    // Truncation of the expansion is a coherent systematic, not pointwise
    // noise, so it does not shrink with the grid size the way the
    // least-squares covariance does. Estimate it by refitting with the top
    // quarter of the grid (in log t) dropped and taking the coefficient
    // shifts.
    let cut = (x.len() * 3) / 4;
    let sys: Vec<f64> = if cut >= powers.len() + 2 && x[cut - 1] / x[0] >= 4.0 {
        let (c_sub, _) = weighted_power_fit(&x[..cut], &y[..cut], &sigma[..cut], &powers)?;
        (0..num_terms).map(|k| (c[k] - c_sub[k]).abs()).collect()
    } else {
        vec![0.0; num_terms]
    };
    let total = |k: usize| (u[k] * u[k] + sys[k] * sys[k]).sqrt();
    Ok(CoefficientSet {
        a0: c[0],
        a1: c[1],
        a2: if num_terms == 3 { c[2] } else { 0.0 },
        bc: crate::spectrum::BoundaryCondition::Dirichlet, // overwritten by caller context
        kind: CoefficientKind::FittedHeat,
        uncertainty: Some([
            total(0),
            total(1),
            if num_terms == 3 { total(2) } else { 0.0 },
        ]),
    })
}

/// Same fit but tagged with the table's boundary condition.
pub fn fit_heat_coefficients_for(
    series: &HeatTraceSeries,
    table: &SpectrumTable,
    num_terms: usize,
) -> Result<CoefficientSet> {
    let mut c = fit_heat_coefficients(series, series.n_dim, num_terms)?;
    c.bc = table.bc();
    Ok(c)
}

/// Counting-function fit of N(Lambda) against {Lambda^{n/2},
/// Lambda^{(n-1)/2}} over a window, reported raw and with Cesaro smoothing
/// (moving average over a window of width Lambda/4) of the oscillating
/// remainder.
pub struct CountingFit {
    pub raw: CoefficientSet,
    pub smoothed: CoefficientSet,
    pub window: (f64, f64),
}

pub fn fit_counting_coefficients(
    table: &SpectrumTable,
    n_dim: u32,
    window: (f64, f64),
) -> Result<CountingFit> {
    let (lo, hi) = window;
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Fit(format!("invalid Lambda window [{lo}, {hi}]")));
    }
    if hi > table.max_reliable() {
        return Err(Error::Range(format!(
            "window edge {hi} beyond certification {}",
            table.max_reliable()
        )));
    }
    if hi / lo < 4.0 {
        return Err(Error::Fit(format!(
            "window spans factor {:.2}; need at least 4 in Lambda",
            hi / lo
        )));
    }
    let n_pts = 400usize;
    let ratio = (hi / lo).powf(1.0 / (n_pts - 1) as f64);
    let mut lam = Vec::with_capacity(n_pts);
    let mut n_raw = Vec::with_capacity(n_pts);
    let mut n_smooth = Vec::with_capacity(n_pts);
    // Prefix sums over the flattened spectrum for fast windowed counts.
    let flat = table.flattened();
    let count_leq = |x: f64| -> f64 { flat.partition_point(|&v| v <= x) as f64 };
    for i in 0..n_pts {
        let l = lo * ratio.powi(i as i32);
        lam.push(l);
        n_raw.push(count_leq(l));
        // Cesaro window of width L/4, clipped symmetrically at the
        // certification edge so the average stays centered.
        let half_w = (l / 8.0).min(table.max_reliable() - l).min(l);
        let (a, b) = (l - half_w, l + half_w);
        let k = 32;
        let mut acc = 0.0;
        for j in 0..k {
            let s = a + (b - a) * (j as f64 + 0.5) / k as f64;
            acc += count_leq(s);
        }
        n_smooth.push(acc / k as f64);
    }
    let powers = [n_dim as f64 / 2.0, (n_dim as f64 - 1.0) / 2.0];
    // Constant absolute weight: the remainder's oscillation amplitude is
    // roughly Lambda-independent on the window scale relative to sqrt(L).
    let sigma: Vec<f64> = lam.iter().map(|l| 1.0 + l.powf(1.0 / 3.0)).collect();
    let (cr, ur) = weighted_power_fit(&lam, &n_raw, &sigma, &powers)?;
    let (cs, us) = weighted_power_fit(&lam, &n_smooth, &sigma, &powers)?;
    let mk = |c: &[f64], u: &[f64]| CoefficientSet {
        a0: c[0],
        a1: c[1],
        a2: 0.0,
        bc: table.bc(),
        kind: CoefficientKind::FittedCounting,
        uncertainty: Some([u[0], u[1], 0.0]),
    };
    Ok(CountingFit {
        raw: mk(&cr, &ur),
        smoothed: mk(&cs, &us),
        window,
    })
}
