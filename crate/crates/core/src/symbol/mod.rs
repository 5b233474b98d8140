//! Matrix symbol machinery for the resolvent parametrix: principal symbol,
//! closed-form principal resolvent, the q_{-3} / q_{-4} recursion, parity
//! and homogeneity diagnostics, and the contour heat densities.

mod heat_density;
mod lame;
mod metric;
mod scalar;
mod smat;

pub use heat_density::{
    boundary_image_term, boundary_image_term_quadrature, heat_integrand_from_residues,
    interior_heat_density, interior_heat_density_quadrature,
};
pub use lame::{q4_terms, CMat, DerivativeBackend, Q4Term, SymbolContext};
pub use metric::{MetricField, MetricJet};
pub use scalar::{HyperDual, SymbolScalar};
pub use smat::SMat;

use crate::error::Result;
use num_complex::Complex64;

/// A graded symbol: homogeneity order in (xi, tau^{1/2}) and an evaluator.
pub struct SymbolMatrix {
    pub order: i32,
    eval: Box<dyn Fn(&[f64], &[f64], Complex64) -> Result<CMat> + Send + Sync>,
}

impl SymbolMatrix {
    pub fn new(
        order: i32,
        eval: impl Fn(&[f64], &[f64], Complex64) -> Result<CMat> + Send + Sync + 'static,
    ) -> Self {
        SymbolMatrix {
            order,
            eval: Box::new(eval),
        }
    }

    pub fn evaluate(&self, x: &[f64], xi: &[f64], tau: Complex64) -> Result<CMat> {
        (self.eval)(x, xi, tau)
    }

    /// |f(x, s xi, s^2 tau) - s^order f(x, xi, tau)| / |s^order f|, the
    /// parabolic-scaling residual used by the spot checks.
    pub fn homogeneity_residual(
        &self,
        x: &[f64],
        xi: &[f64],
        tau: Complex64,
        s: f64,
    ) -> Result<f64> {
        let base = self.evaluate(x, xi, tau)?;
        let xi_s: Vec<f64> = xi.iter().map(|&v| s * v).collect();
        let scaled = self.evaluate(x, &xi_s, tau * (s * s))?;
        let factor = Complex64::new(s, 0.0).powi(self.order);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for (a, b) in scaled.data.iter().zip(&base.data) {
            num += (a - b * factor).norm_sqr();
            den += (b * factor).norm_sqr();
        }
        Ok((num / den.max(1e-300)).sqrt())
    }
}

impl SymbolContext {
    /// Wrap the principal resolvent as a degree -2 symbol.
    pub fn resolvent_symbol(&self) -> SymbolMatrix {
        let ctx = self.clone();
        SymbolMatrix::new(-2, move |x, xi, tau| ctx.resolvent_principal(x, xi, tau))
    }

    /// Wrap q_{-3} as a degree -3 symbol.
    pub fn q3_symbol(&self) -> SymbolMatrix {
        let ctx = self.clone();
        SymbolMatrix::new(-3, move |x, xi, tau| ctx.q_minus_3(x, xi, tau))
    }

    /// Wrap q_{-4} as a degree -4 symbol.
    pub fn q4_symbol(&self) -> SymbolMatrix {
        let ctx = self.clone();
        SymbolMatrix::new(-4, move |x, xi, tau| ctx.q_minus_4(x, xi, tau))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::ElasticModuli;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    fn bench() -> ElasticModuli {
        ElasticModuli::new(1.0, 0.0).unwrap()
    }

    fn flat_ctx(n: usize) -> SymbolContext {
        SymbolContext::new(bench(), MetricField::flat(n))
    }

    fn synthetic_ctx() -> SymbolContext {
        SymbolContext::new(bench(), MetricField::synthetic(2, 0.1))
    }

    #[test]
    fn principal_symbol_flat_benchmark() {
        // flat, n=2, mu=1, lambda=0, xi=(1,0) -> [[2,0],[0,1]].
        let p = flat_ctx(2).principal_symbol(&[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(p[0][0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1][1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn principal_symbol_eigenvalues() {
        // Eigenvalues are mu |xi|^2 (n-1 times) and (2mu+lambda) |xi|^2;
        // oracle: nalgebra's symmetric eigensolver at random xi.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = ElasticModuli::new(1.4, 0.6).unwrap();
        let ctx = SymbolContext::new(m, MetricField::flat(3));
        for _ in 0..5 {
            let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if xi.iter().map(|v| v * v).sum::<f64>() < 1e-3 {
                continue;
            }
            let p = ctx.principal_symbol(&[0.1, -0.3, 0.8], &xi).unwrap();
            let mat = nalgebra::DMatrix::from_fn(3, 3, |i, j| p[i][j]);
            let eig = mat.symmetric_eigen();
            let mut evs: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
            evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let norm2: f64 = xi.iter().map(|v| v * v).sum();
            assert_relative_eq!(evs[0], 1.4 * norm2, max_relative = 1e-12);
            assert_relative_eq!(evs[1], 1.4 * norm2, max_relative = 1e-12);
            assert_relative_eq!(evs[2], (2.0 * 1.4 + 0.6) * norm2, max_relative = 1e-12);
        }
    }

    #[test]
    fn resolvent_trace_benchmark() {
        // flat, n=2, mu=1, lambda=0, xi=(1,0), tau=-1:
        // trace = 1/(tau - 1) + 1/(tau - 2) = -1/2 - 1/3 = -5/6.
        let q = flat_ctx(2)
            .resolvent_principal(&[0.0, 0.0], &[1.0, 0.0], Complex64::new(-1.0, 0.0))
            .unwrap();
        let tr = q.trace();
        assert_abs_diff_eq!(tr.re, -5.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn resolvent_matches_direct_inversion() {
        // Oracle: nalgebra complex LU inversion of (tau I - p2).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let ctx = SymbolContext::new(
            ElasticModuli::new(0.8, 0.3).unwrap(),
            MetricField::synthetic(2, 0.1),
        );
        for _ in 0..20 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let xi = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            if xi.iter().map(|v| v * v).sum::<f64>() < 1e-2 {
                continue;
            }
            let tau = Complex64::new(rng.gen_range(-3.0..-0.5), rng.gen_range(0.5..2.0));
            let q = ctx.resolvent_principal(&x, &xi, tau).unwrap();
            let p = ctx.principal_symbol(&x, &xi).unwrap();
            let a2 = nalgebra::DMatrix::from_fn(2, 2, |i, j| {
                let delta = if i == j { tau } else { Complex64::ZERO };
                delta - Complex64::new(p[i][j], 0.0)
            });
            let inv = a2.try_inverse().unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(q[(i, j)].re, inv[(i, j)].re, epsilon = 1e-12);
                    assert_abs_diff_eq!(q[(i, j)].im, inv[(i, j)].im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn resolvent_trace_pole_decomposition() {
        // Tr = (n-1)/(tau - mu |xi|^2_g) + 1/(tau - (2mu+lambda) |xi|^2_g)
        // at random points on the synthetic metric.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = ElasticModuli::new(1.0, 0.7).unwrap();
        let ctx = SymbolContext::new(m, MetricField::synthetic(2, 0.1));
        for _ in 0..20 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let xi = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let norm2_g = (1.0 + 0.1 * x[0]) * xi[0] * xi[0] + xi[1] * xi[1];
            if norm2_g < 1e-2 {
                continue;
            }
            let tau = Complex64::new(rng.gen_range(-4.0..-1.0), rng.gen_range(0.2..1.5));
            let q = ctx.resolvent_principal(&x, &xi, tau).unwrap();
            let expect = (tau - Complex64::new(1.0 * norm2_g, 0.0)).inv()
                + (tau - Complex64::new(2.7 * norm2_g, 0.0)).inv();
            let tr = q.trace();
            assert_abs_diff_eq!(tr.re, expect.re, epsilon = 1e-12);
            assert_abs_diff_eq!(tr.im, expect.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn scalar_limit_resolvent_is_diagonal() {
        let ctx = SymbolContext::new(
            ElasticModuli::new(1.0, -1.0).unwrap(),
            MetricField::flat(2),
        );
        let tau = Complex64::new(-2.0, 0.3);
        let q = ctx.resolvent_principal(&[0.0, 0.0], &[0.7, -0.4], tau).unwrap();
        let norm2 = 0.49 + 0.16;
        let expect = (tau - Complex64::new(norm2, 0.0)).inv();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { expect } else { Complex64::ZERO };
                assert_abs_diff_eq!(q[(i, j)].re, want.re, epsilon = 1e-14);
                assert_abs_diff_eq!(q[(i, j)].im, want.im, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn pole_proximity_is_an_error() {
        let ctx = flat_ctx(2);
        let r = ctx.resolvent_principal(&[0.0, 0.0], &[1.0, 0.0], Complex64::new(1.0, 0.0));
        assert!(matches!(r, Err(crate::error::Error::Conditioning(_))));
    }

    #[test]
    fn q3_vanishes_on_flat_metric() {
        let ctx = flat_ctx(2);
        let q3 = ctx
            .q_minus_3(&[0.4, -0.2], &[1.0, 0.5], Complex64::new(-1.5, 0.8))
            .unwrap();
        for v in &q3.data {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn q4_vanishes_on_flat_metric() {
        let ctx = flat_ctx(2);
        let q4 = ctx
            .q_minus_4(&[0.4, -0.2], &[1.0, 0.5], Complex64::new(-1.5, 0.8))
            .unwrap();
        for v in &q4.data {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn q3_trace_is_odd_in_xi() {
        let ctx = synthetic_ctx();
        let tau = Complex64::new(-2.0, 1.0);
        for &(x1, x2) in &[(0.3, -0.5), (-0.7, 0.2), (0.0, 0.9)] {
            for &(k1, k2) in &[(1.0, 0.4), (0.3, -1.2), (2.0, 0.0), (0.5, 0.5)] {
                let plus = ctx.q_minus_3(&[x1, x2], &[k1, k2], tau).unwrap();
                let minus = ctx.q_minus_3(&[x1, x2], &[-k1, -k2], tau).unwrap();
                let asym = (plus.trace() + minus.trace()).norm();
                assert!(asym <= 1e-9, "odd-parity residual {asym}");
            }
        }
    }

    #[test]
    fn q4_trace_is_even_in_xi() {
        let ctx = synthetic_ctx();
        let tau = Complex64::new(-2.0, 1.0);
        for &(x1, x2) in &[(0.3, -0.5), (-0.7, 0.2)] {
            for &(k1, k2) in &[(1.0, 0.4), (0.3, -1.2), (1.5, -0.5)] {
                let plus = ctx.q_minus_4(&[x1, x2], &[k1, k2], tau).unwrap();
                let minus = ctx.q_minus_4(&[x1, x2], &[-k1, -k2], tau).unwrap();
                let asym = (plus.trace() - minus.trace()).norm();
                assert!(asym <= 1e-9, "even-parity residual {asym}");
            }
        }
    }

    #[test]
    fn homogeneity_degrees() {
        let ctx = synthetic_ctx();
        let x = [0.25, -0.4];
        let xi = [0.8, -0.6];
        let tau = Complex64::new(-1.2, 0.9);
        for (sym, s_values) in [
            (ctx.resolvent_symbol(), vec![2.0, 1.0 / 3.0]),
            (ctx.q3_symbol(), vec![2.0, 4.0]),
            (ctx.q4_symbol(), vec![2.0, 4.0]),
        ] {
            for s in s_values {
                let r = sym.homogeneity_residual(&x, &xi, tau, s).unwrap();
                assert!(
                    r <= 1e-9,
                    "order {} residual {r} at s = {s}",
                    sym.order
                );
            }
        }
    }

    #[test]
    fn backends_cross_validate() {
        // Dual and central-difference backends agree on d_xi a_2 and
        // d_x q_{-2} to 1e-6.
        let ctx = synthetic_ctx();
        let x = [0.3, -0.2];
        let xi = [1.1, 0.7];
        let tau = Complex64::new(-2.0, 0.5);
        for l in 0..2 {
            let dual = ctx
                .dx_resolvent_with(DerivativeBackend::Dual, &x, &xi, tau, l)
                .unwrap();
            let central = ctx
                .dx_resolvent_with(DerivativeBackend::CentralDifference, &x, &xi, tau, l)
                .unwrap();
            for (a, b) in dual.data.iter().zip(&central.data) {
                assert!((a - b).norm() <= 1e-6, "dx q2 backend gap {}", (a - b).norm());
            }
            let analytic = ctx.dxi_a2_analytic(&x, &xi, l).unwrap();
            let stepped = ctx.dxi_a2_central(&x, &xi, tau, l).unwrap();
            for (a, b) in analytic.data.iter().zip(&stepped.data) {
                assert!((a - b).norm() <= 1e-6, "dxi a2 backend gap {}", (a - b).norm());
            }
        }
    }

    #[test]
    fn q4_with_central_backend_agrees_with_dual() {
        let ctx = synthetic_ctx();
        let x = [0.3, -0.2];
        let xi = [1.1, 0.7];
        let tau = Complex64::new(-2.0, 0.5);
        let dual = ctx.q_minus_4(&x, &xi, tau).unwrap();
        let central = ctx
            .clone()
            .with_backend(DerivativeBackend::CentralDifference)
            .q_minus_4(&x, &xi, tau)
            .unwrap();
        for (a, b) in dual.data.iter().zip(&central.data) {
            assert!((a - b).norm() <= 1e-5, "q4 backend gap {}", (a - b).norm());
        }
    }

    #[test]
    fn q4_term_enumeration_is_complete() {
        // j < 2, j + |alpha| - k = 0, k <= 2: exactly 2 + 2n + n(n+1)/2 terms.
        for n in [2usize, 3] {
            let terms = q4_terms(n);
            assert_eq!(terms.len(), 2 + 2 * n + n * (n + 1) / 2);
            for t in &terms {
                assert!(t.j < 2);
                assert_eq!(t.j + t.alpha.len(), t.k);
            }
        }
    }
}
