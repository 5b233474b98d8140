//! Forward Tauberian direction: the Laplace-Stieltjes transform of a fitted
//! two-term counting model.
//!
//! int_0^inf e^{-ts} d(s^p) = Gamma(p + 1) / t^p, so the model
//! N(Lambda) ~ A Lambda^p + B Lambda^q transforms to
//! Z(t) ~ A Gamma(p+1) / t^p + B Gamma(q+1) / t^q. This direction is valid;
//! the converse (counting asymptotics from heat asymptotics) is not, which
//! is why the heat-side and counting-side coefficient systems are compared
//! through this bridge rather than inverted.

use super::coefficients::CoefficientSet;
use super::partition::HeatTraceSeries;
use crate::error::{Error, Result};
use crate::special::gamma_half;

/// Evaluate the transform of the counting model on a t-grid. The counting
/// fit supplies (A, B) = (a0, a1) against powers (n/2, (n-1)/2).
pub fn tauberian_forward(
    counting: &CoefficientSet,
    n_dim: u32,
    t_grid: &[f64],
) -> Result<HeatTraceSeries> {
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Config("t grid must be strictly positive".into()));
    }
    // Gamma(p + 1) with p = n/2 and Gamma(q + 1) with q = (n-1)/2.
    let g_lead = gamma_half(n_dim + 2)?;
    let g_second = gamma_half(n_dim + 1)?;
    let p = n_dim as f64 / 2.0;
    let q = (n_dim as f64 - 1.0) / 2.0;
    let z: Vec<f64> = t_grid
        .iter()
        .map(|&t| counting.a0 * g_lead / t.powf(p) + counting.a1 * g_second / t.powf(q))
        .collect();
    Ok(HeatTraceSeries {
        t: t_grid.to_vec(),
        z,
        tail_bound: vec![0.0; t_grid.len()],
        n_dim,
        usable: vec![true; t_grid.len()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{fit_counting_coefficients, partition_function, CoefficientKind};
    use crate::exact::scalar_interval_spectrum;
    use crate::spectrum::BoundaryCondition;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn model(a: f64, b: f64) -> CoefficientSet {
        CoefficientSet {
            a0: a,
            a1: b,
            a2: 0.0,
            bc: BoundaryCondition::Dirichlet,
            kind: CoefficientKind::FittedCounting,
            uncertainty: None,
        }
    }

    #[test]
    fn pure_power_is_exact() {
        // v(s) = s (n = 2, A = 1, B = 0) -> Z(t) = 1/t exactly.
        let z = tauberian_forward(&model(1.0, 0.0), 2, &[0.5, 1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(z.z[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(z.z[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(z.z[2], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_laplace_table() {
        // v(s) = s - sqrt(s) -> Z(t) = 1/t - (sqrt(pi)/2)/sqrt(t); cross-checked
        // against a numerical Laplace-Stieltjes quadrature.
        let z = tauberian_forward(&model(1.0, -1.0), 2, &[0.7]).unwrap();
        let expect = 1.0 / 0.7 - (std::f64::consts::PI.sqrt() / 2.0) / 0.7f64.sqrt();
        assert_abs_diff_eq!(z.z[0], expect, epsilon = 1e-12);

        // Numerical quadrature: int_0^inf e^{-ts} v'(s) ds with
        // v'(s) = 1 - 1/(2 sqrt(s)); substituting s = u^2 removes the
        // endpoint singularity.
        let gl = crate::special::gauss_legendre(48);
        let t = 0.7f64;
        let u_max = (45.0 / t).sqrt();
        let quad = crate::special::integrate_panels(
            |u: f64| (-t * u * u).exp() * (2.0 * u - 1.0),
            0.0,
            u_max,
            64,
            &gl,
        );
        assert_relative_eq!(z.z[0], quad, max_relative = 1e-10);
    }

    #[test]
    fn interval_end_to_end() {
        // Fitted counting model of the interval spectrum reproduces its own
        // partition function within 1% on t in [1e-3, 1e-1].
        let table = scalar_interval_spectrum(
            std::f64::consts::PI,
            BoundaryCondition::Dirichlet,
            100_000,
        )
        .unwrap();
        let hi = table.max_reliable() * 0.9;
        let fit = fit_counting_coefficients(&table, 1, (hi / 10_000.0, hi)).unwrap();
        let grid: Vec<f64> = (0..21)
            .map(|i| 1e-3 * (100.0f64).powf(i as f64 / 20.0))
            .collect();
        let z_model = tauberian_forward(&fit.smoothed, 1, &grid).unwrap();
        let z_true = partition_function(&table, &grid, 1).unwrap();
        for k in 0..grid.len() {
            assert_relative_eq!(z_model.z[k], z_true.z[k], max_relative = 0.01);
        }
    }
}
