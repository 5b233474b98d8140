//! Scalar arithmetic the symbol evaluators are generic over: plain complex
//! numbers, or hyperdual complex numbers carrying two directional
//! derivatives and the mixed second derivative.
//!
//! Hyperduals make the x-derivatives of rational symbol expressions exact to
//! rounding, which the 1e-9 parity and homogeneity budgets need; the
//! central-difference backend cross-validates them at coarser tolerance.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait SymbolScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_complex(c: Complex64) -> Self;
    fn from_real(x: f64) -> Self;
    fn zero() -> Self {
        Self::from_real(0.0)
    }
    fn one() -> Self {
        Self::from_real(1.0)
    }
    /// The value part (derivative payload discarded).
    fn value(&self) -> Complex64;
}

impl SymbolScalar for Complex64 {
    fn from_complex(c: Complex64) -> Self {
        c
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn value(&self) -> Complex64 {
        *self
    }
}

/// v + d1 eps1 + d2 eps2 + d12 eps1 eps2 with eps1^2 = eps2^2 = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperDual {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d12: Complex64,
}

impl HyperDual {
    pub fn constant(v: Complex64) -> Self {
        HyperDual {
            v,
            d1: Complex64::ZERO,
            d2: Complex64::ZERO,
            d12: Complex64::ZERO,
        }
    }

    pub fn seeded(v: f64, d1: f64, d2: f64, d12: f64) -> Self {
        HyperDual {
            v: Complex64::new(v, 0.0),
            d1: Complex64::new(d1, 0.0),
            d2: Complex64::new(d2, 0.0),
            d12: Complex64::new(d12, 0.0),
        }
    }

    fn recip(self) -> Self {
        let iv = self.v.inv();
        let iv2 = iv * iv;
        HyperDual {
            v: iv,
            d1: -self.d1 * iv2,
            d2: -self.d2 * iv2,
            d12: (Complex64::new(2.0, 0.0) * self.d1 * self.d2 * iv - self.d12) * iv2,
        }
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        HyperDual {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d12: self.d12 + o.d12,
        }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        HyperDual {
            v: self.v - o.v,
            d1: self.d1 - o.d1,
            d2: self.d2 - o.d2,
            d12: self.d12 - o.d12,
        }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        HyperDual {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
        }
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        HyperDual {
            v: -self.v,
            d1: -self.d1,
            d2: -self.d2,
            d12: -self.d12,
        }
    }
}

impl SymbolScalar for HyperDual {
    fn from_complex(c: Complex64) -> Self {
        HyperDual::constant(c)
    }
    fn from_real(x: f64) -> Self {
        HyperDual::constant(Complex64::new(x, 0.0))
    }
    fn value(&self) -> Complex64 {
        self.v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn derivatives_of_rational_function() {
        // f(x) = x^2 / (1 + x) at x = 2, seeded along the same direction in
        // both slots so d12 is the plain second derivative.
        let x = HyperDual::seeded(2.0, 1.0, 1.0, 0.0);
        let one = HyperDual::from_real(1.0);
        let f = x * x / (one + x);
        let fx = |x: f64| x * x / (1.0 + x);
        assert_abs_diff_eq!(f.v.re, fx(2.0), epsilon = 1e-15);
        // f'(x) = (x^2 + 2x) / (1+x)^2 = 8/9 at x = 2
        assert_abs_diff_eq!(f.d1.re, 8.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.d2.re, 8.0 / 9.0, epsilon = 1e-15);
        // f''(x) = 2 / (1+x)^3 = 2/27 at x = 2
        assert_abs_diff_eq!(f.d12.re, 2.0 / 27.0, epsilon = 1e-15);
    }

    #[test]
    fn mixed_second_derivative() {
        // g(u, w) = u * w + u / w at (u, w) = (3, 2): d2g/dudw = 1 - 1/w^2.
        let u = HyperDual::seeded(3.0, 1.0, 0.0, 0.0);
        let w = HyperDual::seeded(2.0, 0.0, 1.0, 0.0);
        let g = u * w + u / w;
        assert_abs_diff_eq!(g.d12.re, 1.0 - 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g.d1.re, 2.0 + 0.5, epsilon = 1e-15); // dg/du
        assert_abs_diff_eq!(g.d2.re, 3.0 - 0.75, epsilon = 1e-15); // dg/dw
    }
}
