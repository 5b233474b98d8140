//! Self-contained special functions: Bessel J, error function, gamma at
//! half-integers, and Gauss-Legendre quadrature.
//!
//! Everything here is implemented in-repo to a fixed accuracy target so the
//! numerical results do not depend on platform libm quality.

mod bessel;
mod erf;
mod gamma;
mod quad;

pub use bessel::{bessel_j, bessel_j_array, bessel_j_pair, bessel_j_prime, MAX_ORDER};
pub use erf::{erf, erfc};
pub use gamma::{gamma_half, upper_gamma_half};
pub use quad::{gauss_legendre, integrate_panels, GaussLegendre};
