//! Lame parameters and derived wave speeds.

use crate::error::{Error, Result};

/// Lame parameter pair (mu, lambda) with the admissibility constraints
/// mu > 0 and mu + lambda >= 0.
///
/// The squared wave speeds are mu (shear) and 2 mu + lambda (pressure);
/// admissibility keeps both positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticModuli {
    mu: f64,
    lambda: f64,
}

impl ElasticModuli {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !mu.is_finite() || !lambda.is_finite() {
            return Err(Error::Config("moduli must be finite".into()));
        }
        if mu <= 0.0 {
            return Err(Error::Config(format!(
                "shear modulus must satisfy mu > 0, got mu = {mu}"
            )));
        }
        if mu + lambda < 0.0 {
            return Err(Error::Config(format!(
                "moduli must satisfy mu + lambda >= 0, got mu + lambda = {}",
                mu + lambda
            )));
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Squared shear (S) wave speed: mu.
    pub fn s_speed_sq(&self) -> f64 {
        self.mu
    }

    /// Squared pressure (P) wave speed: 2 mu + lambda.
    pub fn p_speed_sq(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }

    /// True when lambda + mu = 0, i.e. both wave speeds coincide and the
    /// operator decouples into scalar Laplacians.
    pub fn is_scalar_limit(&self) -> bool {
        self.mu + self.lambda == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_range() {
        assert!(ElasticModuli::new(1.0, 0.0).is_ok());
        assert!(ElasticModuli::new(1.0, -1.0).is_ok()); // boundary of admissibility
        assert!(ElasticModuli::new(0.0, 1.0).is_err());
        assert!(ElasticModuli::new(-1.0, 3.0).is_err());
        assert!(ElasticModuli::new(1.0, -1.5).is_err());
    }

    #[test]
    fn wave_speeds() {
        let m = ElasticModuli::new(2.0, 1.0).unwrap();
        assert_eq!(m.s_speed_sq(), 2.0);
        assert_eq!(m.p_speed_sq(), 5.0);
        assert!(!m.is_scalar_limit());
        assert!(ElasticModuli::new(1.0, -1.0).unwrap().is_scalar_limit());
    }
}
