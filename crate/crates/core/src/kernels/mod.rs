//! Exact scalar method-of-images heat kernels on the line, half-line, and
//! interval.
//!
//! These are the cases where the reflection construction closes exactly:
//! the kernel with a boundary condition is a signed sum of free Gaussians at
//! reflected source points. Dirichlet reflections carry a minus sign,
//! Neumann reflections a plus; on the interval the reflection group
//! generates the doubly infinite image ladder
//! K(t,x,y) = sum_m (s0 sL)^m [ G(x - y - 2mL) + s0 G(x + y - 2mL) ],
//! with s = -1 for Dirichlet and +1 for Neumann at each end.

use crate::error::{Error, Result};
use crate::special::{erf, gauss_legendre, integrate_panels};
use crate::spectrum::BoundaryCondition;

/// Geometry of a 1D kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry1D {
    Line,
    HalfLine(BoundaryCondition),
    Interval {
        length: f64,
        left: BoundaryCondition,
        right: BoundaryCondition,
    },
}

/// Scalar heat kernel: diffusivity c and geometry, for the equation
/// du/dt = c u''.
#[derive(Debug, Clone, Copy)]
pub struct HeatKernel1D {
    pub diffusivity: f64,
    pub geometry: Geometry1D,
}

/// Free-space kernel (4 pi c t)^{-1/2} exp(-(x-y)^2 / (4 c t)).
pub fn free_kernel(diffusivity: f64, t: f64, x: f64, y: f64) -> f64 {
    let d = x - y;
    (4.0 * std::f64::consts::PI * diffusivity * t).sqrt().recip()
        * (-d * d / (4.0 * diffusivity * t)).exp()
}

fn sign(bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
    }
}

const TERM_CUTOFF: f64 = 1e-16;

impl HeatKernel1D {
    pub fn new(diffusivity: f64, geometry: Geometry1D) -> Result<Self> {
        if !(diffusivity > 0.0) {
            return Err(Error::Config(format!(
                "diffusivity must be positive, got {diffusivity}"
            )));
        }
        if let Geometry1D::Interval { length, .. } = geometry {
            if !(length > 0.0) {
                return Err(Error::Config(format!(
                    "interval length must be positive, got {length}"
                )));
            }
        }
        Ok(Self {
            diffusivity,
            geometry,
        })
    }

    fn contains(&self, x: f64) -> bool {
        match self.geometry {
            Geometry1D::Line => true,
            Geometry1D::HalfLine(_) => x >= 0.0,
            Geometry1D::Interval { length, .. } => (0.0..=length).contains(&x),
        }
    }

    /// Kernel value K(t, x, y) for t > 0 and x, y in the geometry.
    pub fn evaluate(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Range(format!("kernel needs t > 0, got {t}")));
        }
        if !self.contains(x) || !self.contains(y) {
            return Err(Error::Range(format!(
                "point ({x}, {y}) outside the kernel geometry"
            )));
        }
        let c = self.diffusivity;
        Ok(match self.geometry {
            Geometry1D::Line => free_kernel(c, t, x, y),
            Geometry1D::HalfLine(bc) => {
                free_kernel(c, t, x, y) + sign(bc) * free_kernel(c, t, x, -y)
            }
            Geometry1D::Interval {
                length,
                left,
                right,
            } => {
                let (s0, s_pair) = (sign(left), sign(left) * sign(right));
                // m = 0 term, then expand symmetrically until terms vanish.
                let mut sum = free_kernel(c, t, x, y) + s0 * free_kernel(c, t, x, -y);
                let mut m = 1i64;
                loop {
                    let w = if s_pair < 0.0 && m % 2 != 0 { -1.0 } else { 1.0 };
                    let shift = 2.0 * m as f64 * length;
                    let add = w
                        * (free_kernel(c, t, x, y + shift)
                            + s0 * free_kernel(c, t, x, -y + shift)
                            + free_kernel(c, t, x, y - shift)
                            + s0 * free_kernel(c, t, x, -y - shift));
                    sum += add;
                    if add.abs() < TERM_CUTOFF * sum.abs().max(1e-30) {
                        break;
                    }
                    m += 1;
                    if m > 10_000 {
                        break;
                    }
                }
                sum
            }
        })
    }

    /// Trace integral of K(t, x, x) over the geometry. Closed image-series
    /// form for same-sign ends; adaptive quadrature for mixed ends.
    pub fn trace(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Range(format!("trace needs t > 0, got {t}")));
        }
        let c = self.diffusivity;
        match self.geometry {
            Geometry1D::Line | Geometry1D::HalfLine(_) => Err(Error::Range(
                "trace over an unbounded geometry diverges; use window_trace".into(),
            )),
            Geometry1D::Interval {
                length,
                left,
                right,
            } => {
                if left == right {
                    // Tr = L sum_m G(2mL) + s0 / 2 * (-1 if Dirichlet);
                    // the cross terms integrate to exactly s0/2 over R.
                    let mut sum = free_kernel(c, t, 0.0, 0.0);
                    let mut m = 1i64;
                    loop {
                        let add = 2.0 * free_kernel(c, t, 0.0, 2.0 * m as f64 * length);
                        sum += add;
                        if add.abs() < TERM_CUTOFF * sum.abs() {
                            break;
                        }
                        m += 1;
                        if m > 10_000 {
                            break;
                        }
                    }
                    Ok(length * sum + 0.5 * sign(left))
                } else {
                    // Mixed ends: integrate the diagonal numerically.
                    let gl = gauss_legendre(32);
                    let val = integrate_panels(
                        |x| self.evaluate(t, x, x).expect("in range"),
                        0.0,
                        length,
                        64,
                        &gl,
                    );
                    Ok(val)
                }
            }
        }
    }

    /// Half-line kernel trace restricted to the window (0, a):
    /// a / sqrt(4 pi c t) -+ (1/4) erf(a / sqrt(c t)).
    /// This is the 1D mechanism behind the -+ 1/4 boundary factor.
    pub fn window_trace(&self, t: f64, a: f64) -> Result<f64> {
        if !(t > 0.0) || !(a > 0.0) {
            return Err(Error::Range("window trace needs t > 0 and a > 0".into()));
        }
        match self.geometry {
            Geometry1D::HalfLine(bc) => {
                let c = self.diffusivity;
                Ok(a / (4.0 * std::f64::consts::PI * c * t).sqrt()
                    + sign(bc) * 0.25 * erf(a / (c * t).sqrt()))
            }
            _ => Err(Error::Range(
                "window trace is defined for the half-line geometry".into(),
            )),
        }
    }
}
