//! Geometric data entering the asymptotic coefficient formulas.

use crate::error::{Error, Result};

/// Volumes and curvature integrals of the domain. Curvature never enters
/// through a metric here; the user supplies the integrals directly.
///
/// `sigma_h` is the sign convention applied to the mean-curvature integral:
/// the third heat coefficient changes sign with the orientation of the
/// boundary normal and the formula itself does not fix one. The default +1
/// corresponds to the outward-normal curvature of the unit circle being +1,
/// i.e. the disk preset carries integral_h = 2 pi.
#[derive(Debug, Clone, Copy)]
pub struct GeometryData {
    pub n: u32,
    pub vol_omega: f64,
    pub vol_boundary: f64,
    pub integral_r: f64,
    pub integral_h: f64,
    /// Number of holes (2D only), used by the scalar reference constants.
    pub holes: Option<u32>,
    pub sigma_h: f64,
    /// Set on domains with boundary corners: the smooth-boundary hypothesis
    /// behind the coefficient formulas does not cover them, so results are
    /// labeled extrapolations.
    pub corner_caveat: bool,
}

impl GeometryData {
    pub fn disk(radius: f64) -> Self {
        GeometryData {
            n: 2,
            vol_omega: std::f64::consts::PI * radius * radius,
            vol_boundary: 2.0 * std::f64::consts::PI * radius,
            integral_r: 0.0,
            // Mean curvature 1/r over a circle of length 2 pi r.
            integral_h: 2.0 * std::f64::consts::PI,
            holes: Some(0),
            sigma_h: 1.0,
            corner_caveat: false,
        }
    }

    pub fn square(side: f64) -> Self {
        GeometryData {
            n: 2,
            vol_omega: side * side,
            vol_boundary: 4.0 * side,
            integral_r: 0.0,
            integral_h: 0.0, // flat edges; corners flagged below
            holes: Some(0),
            sigma_h: 1.0,
            corner_caveat: true,
        }
    }

    pub fn interval(length: f64) -> Self {
        GeometryData {
            n: 1,
            vol_omega: length,
            vol_boundary: 2.0,
            integral_r: 0.0,
            integral_h: 0.0,
            holes: None,
            sigma_h: 1.0,
            corner_caveat: false,
        }
    }

    pub fn with_sigma_h(mut self, sigma_h: f64) -> Result<Self> {
        if sigma_h != 1.0 && sigma_h != -1.0 {
            return Err(Error::Config(format!(
                "sigma_h must be +1 or -1, got {sigma_h}"
            )));
        }
        self.sigma_h = sigma_h;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.vol_omega > 0.0) || !(self.vol_boundary > 0.0) {
            return Err(Error::Config(
                "geometry volumes must be positive".into(),
            ));
        }
        if self.n == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        Ok(())
    }
}
