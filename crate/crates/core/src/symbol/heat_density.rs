//! Pointwise heat densities from the resolvent trace: the interior density
//! and the half-space image boundary term, each in closed form with an
//! independent quadrature route.
//!
//! The contour integral (1/2 pi i) oint e^{-t tau} Tr q_{-2} d tau is never
//! evaluated numerically: the trace is rational in tau with simple poles at
//! mu |xi|^2 and (2 mu + lambda) |xi|^2, so the residue theorem gives
//! (n-1) e^{-t mu |xi|^2} + e^{-t (2 mu + lambda) |xi|^2} exactly, and the
//! xi-integrals of that are Gaussians.

use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use crate::special::{gamma_half, gauss_legendre, integrate_panels};

/// Residue evaluation of the contour integral of Tr q_{-2}: the heat
/// integrand (n-1) e^{-t mu r2} + e^{-t (2mu+lambda) r2} at |xi|^2 = r2.
pub fn heat_integrand_from_residues(m: &ElasticModuli, n: u32, xi_norm_sq: f64, t: f64) -> f64 {
    (n as f64 - 1.0) * (-t * m.s_speed_sq() * xi_norm_sq).exp()
        + (-t * m.p_speed_sq() * xi_norm_sq).exp()
}

/// Interior density in closed form:
/// (n-1)/(4 pi mu t)^{n/2} + 1/(4 pi (2 mu + lambda) t)^{n/2}.
pub fn interior_heat_density(m: &ElasticModuli, n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Range(format!("heat density needs t > 0, got {t}")));
    }
    let four_pi_t = 4.0 * std::f64::consts::PI * t;
    Ok((n as f64 - 1.0) / (four_pi_t * m.s_speed_sq()).powf(n as f64 / 2.0)
        + 1.0 / (four_pi_t * m.p_speed_sq()).powf(n as f64 / 2.0))
}

/// The same density via radial quadrature of
/// (2 pi)^{-n} int [(n-1) e^{-t mu |xi|^2} + e^{-t c_p |xi|^2}] d xi.
pub fn interior_heat_density_quadrature(m: &ElasticModuli, n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Range(format!("heat density needs t > 0, got {t}")));
    }
    let nf = n as f64;
    // Surface area of the unit (n-1)-sphere: 2 pi^{n/2} / Gamma(n/2).
    let omega = 2.0 * std::f64::consts::PI.powf(nf / 2.0) / gamma_half(n)?;
    let gl = gauss_legendre(32);
    let c_slow = t * m.s_speed_sq().min(m.p_speed_sq());
    let rho_max = (45.0 / c_slow).sqrt();
    let val = integrate_panels(
        |rho: f64| heat_integrand_from_residues(m, n, rho * rho, t) * rho.powf(nf - 1.0),
        0.0,
        rho_max,
        64,
        &gl,
    );
    Ok(omega * val / (2.0 * std::f64::consts::PI).powf(nf))
}

/// Half-space image boundary term in closed form:
/// (1/4) [ (n-1)/(4 pi mu t)^{(n-1)/2} + 1/(4 pi (2mu+lambda) t)^{(n-1)/2} ].
/// Its sign flips with the boundary condition; the magnitude is returned.
pub fn boundary_image_term(m: &ElasticModuli, n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Range(format!("boundary term needs t > 0, got {t}")));
    }
    let four_pi_t = 4.0 * std::f64::consts::PI * t;
    let p = (n as f64 - 1.0) / 2.0;
    Ok(0.25
        * ((n as f64 - 1.0) / (four_pi_t * m.s_speed_sq()).powf(p)
            + 1.0 / (four_pi_t * m.p_speed_sq()).powf(p)))
}

/// Quadrature route for the image term: for each wave speed c,
/// int_0^inf (2 pi)^{-1} int_R e^{2 i x_n xi_n} e^{-t c xi_n^2} d xi_n d x_n
/// (the oscillatory normal integral, Gaussian-damped) times the analytic
/// tangential factor (4 pi c t)^{-(n-1)/2}.
pub fn boundary_image_term_quadrature(m: &ElasticModuli, n: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Range(format!("boundary term needs t > 0, got {t}")));
    }
    let gl = gauss_legendre(24);
    let mut total = 0.0;
    let four_pi_t = 4.0 * std::f64::consts::PI * t;
    let weights = [(n as f64 - 1.0, m.s_speed_sq()), (1.0, m.p_speed_sq())];
    for (w, c) in weights {
        if w == 0.0 {
            continue;
        }
        let damp = t * c;
        let xi_max = (45.0 / damp).sqrt();
        let x_max = (45.0 * damp).sqrt();
        // Tangential directions integrate to (4 pi c t)^{-(n-1)/2} ... the
        // normal-oscillation factor carries the quarter.
        let tangential = (four_pi_t * c).powf(-((n as f64) - 1.0) / 2.0);
        let inner = |x_n: f64| {
            integrate_panels(
                |xi: f64| (2.0 * x_n * xi).cos() * (-damp * xi * xi).exp(),
                -xi_max,
                xi_max,
                200,
                &gl,
            ) / (2.0 * std::f64::consts::PI)
        };
        let outer = integrate_panels(inner, 0.0, x_max, 200, &gl);
        // Dimensional bookkeeping: the normal direction contributed one
        // (2 pi)^{-1} already; the remaining (2 pi)^{-(n-1)} cancels into
        // the tangential Gaussian factor, which is already normalized.
        let val = w * tangential * outer;
        total += val;
        if !val.is_finite() {
            return Err(Error::Integration {
                achieved: f64::INFINITY,
                requested: 1e-8,
            });
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn bench() -> ElasticModuli {
        ElasticModuli::new(1.0, 0.0).unwrap()
    }

    #[test]
    fn interior_closed_form_benchmark() {
        // n=2, mu=1, lambda=0, t=1: 1/(4 pi) + 1/(8 pi) = 3/(8 pi).
        let v = interior_heat_density(&bench(), 2, 1.0).unwrap();
        assert_abs_diff_eq!(v, 3.0 / (8.0 * std::f64::consts::PI), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.11936620731892, epsilon = 1e-9);
    }

    #[test]
    fn interior_quadrature_matches_closed_form() {
        for &t in &[0.1, 1.0, 10.0] {
            for n in [1u32, 2, 3] {
                let cf = interior_heat_density(&bench(), n, t).unwrap();
                let q = interior_heat_density_quadrature(&bench(), n, t).unwrap();
                assert_relative_eq!(cf, q, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn scalar_limit_is_n_times_scalar_density() {
        let m = ElasticModuli::new(1.0, -1.0).unwrap();
        for n in [2u32, 3] {
            let v = interior_heat_density(&m, n, 0.7).unwrap();
            let scalar = (4.0 * std::f64::consts::PI * 0.7).powf(-(n as f64) / 2.0);
            assert_relative_eq!(v, n as f64 * scalar, max_relative = 1e-14);
        }
    }

    #[test]
    fn boundary_closed_form_benchmark() {
        // n=2, mu=1, lambda=0, t=1: (1/4)(1/sqrt(4pi) + 1/sqrt(8pi)).
        let v = boundary_image_term(&bench(), 2, 1.0).unwrap();
        let four_pi = 4.0 * std::f64::consts::PI;
        let expect = 0.25 * (1.0 / four_pi.sqrt() + 1.0 / (2.0 * four_pi).sqrt());
        assert_abs_diff_eq!(v, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.1203915, epsilon = 1e-7);
    }

    #[test]
    fn boundary_quadrature_matches_closed_form() {
        for &t in &[0.25, 1.0] {
            for n in [2u32, 3] {
                let cf = boundary_image_term(&bench(), n, t).unwrap();
                let q = boundary_image_term_quadrature(&bench(), n, t).unwrap();
                assert_relative_eq!(cf, q, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn quarter_ratio_is_exact() {
        // The image term over the two-speed boundary bracket
        // (n-1)/(4 pi mu t)^{(n-1)/2} + 1/(4 pi (2mu+lambda) t)^{(n-1)/2}
        // is exactly 1/4 in closed form.
        let m = ElasticModuli::new(1.3, 0.4).unwrap();
        for n in [2u32, 3, 4] {
            let t = 0.9;
            let b = boundary_image_term(&m, n, t).unwrap();
            let four_pi_t = 4.0 * std::f64::consts::PI * t;
            let p = (n as f64 - 1.0) / 2.0;
            let bracket = (n as f64 - 1.0) / (four_pi_t * m.s_speed_sq()).powf(p)
                + 1.0 / (four_pi_t * m.p_speed_sq()).powf(p);
            assert_relative_eq!(b / bracket, 0.25, max_relative = 1e-14);
        }
    }

    #[test]
    fn residue_form_matches_direct_exponentials() {
        let m = ElasticModuli::new(2.0, 0.5).unwrap();
        let v = heat_integrand_from_residues(&m, 3, 1.7, 0.3);
        let expect = 2.0 * (-0.3 * 2.0 * 1.7f64).exp() + (-0.3 * 4.5 * 1.7f64).exp();
        assert_abs_diff_eq!(v, expect, epsilon = 1e-15);
    }
}
