//! Closed-form evaluators for the two-term heat-trace and counting-function
//! coefficients, plus the scalar reference constants.

use super::geometry::GeometryData;
use crate::error::Result;
use crate::moduli::ElasticModuli;
use crate::special::gamma_half;
use crate::spectrum::BoundaryCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    TheoreticalHeat,
    TheoreticalCounting,
    FittedHeat,
    FittedCounting,
}

impl CoefficientKind {
    pub fn label(&self) -> &'static str {
        match self {
            CoefficientKind::TheoreticalHeat => "theoretical_heat",
            CoefficientKind::TheoreticalCounting => "theoretical_counting",
            CoefficientKind::FittedHeat => "fitted_heat",
            CoefficientKind::FittedCounting => "fitted_counting",
        }
    }
}

/// Asymptotic coefficient triple. For heat kinds these are (a0, a1, a2) in
/// Z(t) = t^{-n/2} (a0 + a1 t^{1/2} + a2 t + ...); for counting kinds a0 and
/// a1 multiply Lambda^{n/2} and Lambda^{(n-1)/2} and a2 is unused (zero).
#[derive(Debug, Clone, Copy)]
pub struct CoefficientSet {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub bc: BoundaryCondition,
    pub kind: CoefficientKind,
    /// Per-coefficient 1-sigma uncertainties; fitted kinds only.
    pub uncertainty: Option<[f64; 3]>,
}

fn bc_sign(bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
    }
}

/// The two-speed bracket (n-1)/(4 pi mu)^p + 1/(4 pi (2 mu + lambda))^p.
fn speed_bracket(moduli: &ElasticModuli, n: u32, twice_p: u32) -> f64 {
    let p = twice_p as f64 / 2.0;
    let four_pi = 4.0 * std::f64::consts::PI;
    (n as f64 - 1.0) / (four_pi * moduli.s_speed_sq()).powf(p)
        + 1.0 / (four_pi * moduli.p_speed_sq()).powf(p)
}

/// Heat-trace coefficients:
/// a0 = bracket_{n/2} vol(Omega),
/// a1 = -+ (1/4) bracket_{(n-1)/2} vol(boundary),
/// a2 = bracket_{n/2} (integral_R / 3 - sigma_H integral_H / 6).
pub fn heat_coefficients(
    moduli: &ElasticModuli,
    geom: &GeometryData,
    bc: BoundaryCondition,
) -> Result<CoefficientSet> {
    geom.validate()?;
    let n = geom.n;
    let a0 = speed_bracket(moduli, n, n) * geom.vol_omega;
    let a1 = bc_sign(bc) * 0.25 * speed_bracket(moduli, n, n - 1) * geom.vol_boundary;
    let a2 = speed_bracket(moduli, n, n)
        * (geom.integral_r / 3.0 - geom.sigma_h * geom.integral_h / 6.0);
    Ok(CoefficientSet {
        a0,
        a1,
        a2,
        bc,
        kind: CoefficientKind::TheoreticalHeat,
        uncertainty: None,
    })
}

/// Counting-function coefficients; these share the heat brackets divided by
/// Gamma(1 + n/2) and Gamma(1 + (n-1)/2) respectively.
pub fn counting_coefficients(
    moduli: &ElasticModuli,
    geom: &GeometryData,
    bc: BoundaryCondition,
) -> Result<CoefficientSet> {
    geom.validate()?;
    let n = geom.n;
    let lead = speed_bracket(moduli, n, n) * geom.vol_omega / gamma_half(n + 2)?;
    let second = bc_sign(bc) * 0.25 * speed_bracket(moduli, n, n - 1) * geom.vol_boundary
        / gamma_half(n + 1)?;
    Ok(CoefficientSet {
        a0: lead,
        a1: second,
        a2: 0.0,
        bc,
        kind: CoefficientKind::TheoreticalCounting,
        uncertainty: None,
    })
}

/// Scalar 2D reference constants in the same normalization as
/// `heat_coefficients` output for one scalar component:
/// (area/(4 pi), -perimeter/(4 sqrt(4 pi)), (1 - holes)/6).
///
/// Returns the triple and a caveat flag: the formula assumes a smooth
/// boundary, so corner domains are flagged as not covered.
pub fn mckean_singer_reference(geom: &GeometryData) -> Result<((f64, f64, f64), bool)> {
    geom.validate()?;
    if geom.n != 2 {
        return Err(crate::error::Error::Config(
            "scalar reference constants are 2D only".into(),
        ));
    }
    let holes = geom.holes.unwrap_or(0) as f64;
    let four_pi = 4.0 * std::f64::consts::PI;
    let triple = (
        geom.vol_omega / four_pi,
        -geom.vol_boundary / (4.0 * four_pi.sqrt()),
        (1.0 - holes) / 6.0,
    );
    Ok((triple, geom.corner_caveat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn disk_bench() -> (ElasticModuli, GeometryData) {
        (ElasticModuli::new(1.0, 0.0).unwrap(), GeometryData::disk(1.0))
    }

    #[test]
    fn benchmark_disk_dirichlet() {
        let (m, g) = disk_bench();
        let c = heat_coefficients(&m, &g, BoundaryCondition::Dirichlet).unwrap();
        // a0 = (1/(4pi) + 1/(8pi)) pi = 3/8; a1 = -(sqrt(pi)/4)(1 + 1/sqrt(2));
        // a2 = (3/(8pi)) (-pi/3) = -1/8 with sigma_H = +1.
        assert_abs_diff_eq!(c.a0, 0.375, epsilon = 1e-15);
        let exact_a1 = -(std::f64::consts::PI.sqrt() / 4.0)
            * (1.0 + 1.0 / std::f64::consts::SQRT_2);
        assert_relative_eq!(c.a1, exact_a1, max_relative = 1e-14);
        assert_abs_diff_eq!(c.a2, -0.125, epsilon = 1e-15);
    }

    #[test]
    fn neumann_flips_a1_only() {
        let (m, g) = disk_bench();
        let d = heat_coefficients(&m, &g, BoundaryCondition::Dirichlet).unwrap();
        let n = heat_coefficients(&m, &g, BoundaryCondition::Neumann).unwrap();
        assert_eq!(d.a0, n.a0);
        assert_eq!(d.a1, -n.a1);
        assert_eq!(d.a2, n.a2);
        assert!(d.a1 < 0.0 && n.a1 > 0.0);
    }

    #[test]
    fn scalar_limit_collapses_brackets() {
        let m = ElasticModuli::new(2.0, -2.0).unwrap();
        let g = GeometryData::disk(1.0);
        let c = heat_coefficients(&m, &g, BoundaryCondition::Dirichlet).unwrap();
        // both speeds equal mu: a0 = n/(4 pi mu) * vol.
        let expect = 2.0 / (4.0 * std::f64::consts::PI * 2.0) * g.vol_omega;
        assert_relative_eq!(c.a0, expect, max_relative = 1e-14);
    }

    #[test]
    fn gamma_ratio_identity() {
        // counting a0 = heat a0 / Gamma(1 + n/2), counting a1 = heat a1 /
        // Gamma(1 + (n-1)/2) for all admissible inputs.
        let cases = [
            (1.0, 0.0),
            (1.0, -1.0),
            (2.5, 1.3),
            (0.7, -0.2),
            (3.0, 10.0),
        ];
        for (mu, lambda) in cases {
            let m = ElasticModuli::new(mu, lambda).unwrap();
            for geom in [
                GeometryData::disk(1.7),
                GeometryData::square(0.8),
                GeometryData::interval(2.2),
            ] {
                for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
                    let h = heat_coefficients(&m, &geom, bc).unwrap();
                    let c = counting_coefficients(&m, &geom, bc).unwrap();
                    let g_lead = gamma_half(geom.n + 2).unwrap();
                    let g_sec = gamma_half(geom.n + 1).unwrap();
                    assert_relative_eq!(c.a0, h.a0 / g_lead, max_relative = 1e-13);
                    assert_relative_eq!(c.a1, h.a1 / g_sec, max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn counting_benchmark_disk() {
        let (m, g) = disk_bench();
        let c = counting_coefficients(&m, &g, BoundaryCondition::Dirichlet).unwrap();
        assert_abs_diff_eq!(c.a0, 0.375, epsilon = 1e-15); // Gamma(2) = 1
        // second = heat a1 / Gamma(3/2) = -(1 + 1/sqrt(2))/2.
        let exact = -(1.0 + 1.0 / std::f64::consts::SQRT_2) / 2.0;
        assert_relative_eq!(c.a1, exact, max_relative = 1e-14);
    }

    #[test]
    fn interval_scalar_counting() {
        // n = 1 at the scalar limit: leading = L / (pi sqrt(mu)) per
        // component against the exact count floor(L sqrt(Lambda) / pi).
        let m = ElasticModuli::new(1.0, -1.0).unwrap();
        let g = GeometryData::interval(std::f64::consts::PI);
        let c = counting_coefficients(&m, &g, BoundaryCondition::Dirichlet).unwrap();
        // leading coefficient: (1/Gamma(3/2)) * (1/sqrt(4 pi)) * L = 1 for L = pi.
        assert_relative_eq!(c.a0, 1.0, max_relative = 1e-14);
        assert_relative_eq!(c.a1, -0.5, max_relative = 1e-14);
    }

    #[test]
    fn mckean_singer_disk_square_annulus() {
        let ((a, b, c), caveat) = mckean_singer_reference(&GeometryData::disk(1.0)).unwrap();
        assert_abs_diff_eq!(a, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b, -0.4431134627263789, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 1.0 / 6.0, epsilon = 1e-15);
        assert!(!caveat);

        let ((a, b, c2), caveat) = mckean_singer_reference(&GeometryData::square(1.0)).unwrap();
        assert_abs_diff_eq!(a, 1.0 / (4.0 * std::f64::consts::PI), epsilon = 1e-15);
        assert_abs_diff_eq!(b, -1.0 / (4.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(c2, 1.0 / 6.0, epsilon = 1e-15);
        assert!(caveat, "corner domains are not covered by the smooth formula");

        let mut annulus = GeometryData::disk(1.0);
        annulus.holes = Some(1);
        let ((_, _, c3), _) = mckean_singer_reference(&annulus).unwrap();
        assert_eq!(c3, 0.0);
    }
}
