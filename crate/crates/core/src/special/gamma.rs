//! Gamma and upper incomplete gamma at half-integer arguments, which is all
//! the asymptotic formulas need (arguments n/2, (n +- 1)/2, ...).

use super::erf::erfc;
use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.7724538509055160273;

/// Gamma(a) for a = twice_a / 2 > 0.
pub fn gamma_half(twice_a: u32) -> Result<f64> {
    if twice_a == 0 {
        return Err(Error::Range("gamma argument must be positive".into()));
    }
    // Walk down from Gamma(1/2) = sqrt(pi) or Gamma(1) = 1.
    let mut val = if twice_a % 2 == 1 { SQRT_PI } else { 1.0 };
    let mut t = if twice_a % 2 == 1 { 1u32 } else { 2u32 };
    while t < twice_a {
        val *= t as f64 / 2.0;
        t += 2;
    }
    Ok(val)
}

/// Upper incomplete gamma Gamma(a, x) = int_x^inf s^{a-1} e^{-s} ds for
/// a = twice_a / 2 and x >= 0, by the upward recurrence
/// Gamma(a+1, x) = a Gamma(a, x) + x^a e^{-x}.
pub fn upper_gamma_half(twice_a: u32, x: f64) -> Result<f64> {
    if twice_a == 0 || x < 0.0 {
        return Err(Error::Range(format!(
            "upper incomplete gamma needs a > 0 and x >= 0 (a = {}/2, x = {x})",
            twice_a
        )));
    }
    let (mut val, mut t) = if twice_a % 2 == 1 {
        (SQRT_PI * erfc(x.sqrt()), 1u32)
    } else {
        ((-x).exp(), 2u32)
    };
    while t < twice_a {
        let a = t as f64 / 2.0;
        val = a * val + x.powf(a) * (-x).exp();
        t += 2;
    }
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(gamma_half(2).unwrap(), 1.0, epsilon = 1e-15); // Gamma(1)
        assert_abs_diff_eq!(gamma_half(1).unwrap(), SQRT_PI, epsilon = 1e-15); // Gamma(1/2)
        assert_abs_diff_eq!(gamma_half(3).unwrap(), SQRT_PI / 2.0, epsilon = 1e-15); // Gamma(3/2)
        assert_abs_diff_eq!(gamma_half(8).unwrap(), 6.0, epsilon = 1e-14); // Gamma(4)
        assert_abs_diff_eq!(
            gamma_half(7).unwrap(),
            15.0 / 8.0 * SQRT_PI,
            epsilon = 1e-14
        ); // Gamma(7/2)
    }

    #[test]
    fn incomplete_gamma_against_quadrature() {
        // Independent oracle: composite Gauss-Legendre on [x, x + 60].
        let gl = super::super::gauss_legendre(48);
        for &(twice_a, x) in &[(1u32, 0.3f64), (2, 1.0), (3, 0.5), (4, 2.0), (5, 0.1)] {
            let a = twice_a as f64 / 2.0;
            let oracle = super::super::integrate_panels(
                |s: f64| s.powf(a - 1.0) * (-s).exp(),
                x.max(1e-12),
                x + 60.0,
                64,
                &gl,
            );
            assert_relative_eq!(
                upper_gamma_half(twice_a, x).unwrap(),
                oracle,
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn limits() {
        // Gamma(a, 0) = Gamma(a)
        for twice_a in 1..=6u32 {
            assert_relative_eq!(
                upper_gamma_half(twice_a, 0.0).unwrap(),
                gamma_half(twice_a).unwrap(),
                max_relative = 1e-14
            );
        }
    }
}
