//! Inverse-metric fields with analytic first and second derivatives.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Pointwise jet of the inverse metric: components g^{jk}(x), first
/// derivatives d g^{jk} / d x_l, and second derivatives
/// d^2 g^{jk} / d x_l d x_m.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub n: usize,
    /// `g[(j, k)]` row-major, n x n, symmetric positive definite.
    pub g: Vec<f64>,
    /// `dg[l][(j, k)]`: derivative along x_l.
    pub dg: Vec<Vec<f64>>,
    /// `d2g[l][m][(j, k)]`: second derivative along (x_l, x_m), symmetric in
    /// (l, m).
    pub d2g: Vec<Vec<Vec<f64>>>,
}

impl MetricJet {
    pub fn g_at(&self, j: usize, k: usize) -> f64 {
        self.g[j * self.n + k]
    }
}

/// A field x -> inverse metric jet. Flat and the synthetic perturbed preset
/// are constructors; arbitrary fields can be supplied as closures.
#[derive(Clone)]
pub struct MetricField {
    n: usize,
    eval: Arc<dyn Fn(&[f64]) -> MetricJet + Send + Sync>,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MetricField(n = {})", self.n)
    }
}

impl MetricField {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn new(
        n: usize,
        eval: impl Fn(&[f64]) -> MetricJet + Send + Sync + 'static,
    ) -> Self {
        MetricField {
            n,
            eval: Arc::new(eval),
        }
    }

    /// Identity inverse metric with vanishing derivatives.
    pub fn flat(n: usize) -> Self {
        Self::new(n, move |_x| MetricJet {
            n,
            g: {
                let mut g = vec![0.0; n * n];
                for i in 0..n {
                    g[i * n + i] = 1.0;
                }
                g
            },
            dg: vec![vec![0.0; n * n]; n],
            d2g: vec![vec![vec![0.0; n * n]; n]; n],
        })
    }

    /// The deterministic non-flat test metric
    /// g^{jk} = delta^{jk} + eps x_1 delta^{j1} delta^{k1}: derivatives are
    /// known in closed form, so parity and homogeneity tests are exact.
    pub fn synthetic(n: usize, eps: f64) -> Self {
        Self::new(n, move |x| {
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                g[i * n + i] = 1.0;
            }
            g[0] += eps * x[0];
            let mut dg = vec![vec![0.0; n * n]; n];
            dg[0][0] = eps;
            MetricJet {
                n,
                g,
                dg,
                d2g: vec![vec![vec![0.0; n * n]; n]; n],
            }
        })
    }

    /// Evaluate and validate the jet at a point.
    pub fn jet(&self, x: &[f64]) -> Result<MetricJet> {
        if x.len() != self.n {
            return Err(Error::Config(format!(
                "point dimension {} does not match metric dimension {}",
                x.len(),
                self.n
            )));
        }
        let jet = (self.eval)(x);
        // Symmetry and positivity spot check (leading minors).
        for j in 0..self.n {
            for k in 0..j {
                if (jet.g_at(j, k) - jet.g_at(k, j)).abs() > 1e-12 {
                    return Err(Error::Numerics(format!(
                        "inverse metric not symmetric at {x:?}"
                    )));
                }
            }
        }
        let mut minor = 1.0;
        for k in 1..=self.n {
            minor = leading_minor(&jet.g, self.n, k);
            if minor <= 0.0 {
                break;
            }
        }
        if minor <= 0.0 {
            return Err(Error::Numerics(format!(
                "inverse metric not positive definite at {x:?}"
            )));
        }
        Ok(jet)
    }
}

fn leading_minor(g: &[f64], n: usize, k: usize) -> f64 {
    match k {
        1 => g[0],
        2 => g[0] * g[n + 1] - g[1] * g[n],
        3 => {
            let m = |i: usize, j: usize| g[i * n + j];
            m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
        }
        _ => {
            // Gaussian elimination determinant for larger minors.
            let mut a: Vec<Vec<f64>> = (0..k)
                .map(|i| (0..k).map(|j| g[i * n + j]).collect())
                .collect();
            let mut det = 1.0;
            for c in 0..k {
                let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
                if a[piv][c] == 0.0 {
                    return 0.0;
                }
                if piv != c {
                    a.swap(piv, c);
                    det = -det;
                }
                det *= a[c][c];
                for r in c + 1..k {
                    let f = a[r][c] / a[c][c];
                    for j in c..k {
                        a[r][j] -= f * a[c][j];
                    }
                }
            }
            det
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_jet() {
        let m = MetricField::flat(2);
        let jet = m.jet(&[0.3, -1.0]).unwrap();
        assert_eq!(jet.g, vec![1.0, 0.0, 0.0, 1.0]);
        assert!(jet.dg.iter().all(|d| d.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn synthetic_jet() {
        let m = MetricField::synthetic(2, 0.1);
        let jet = m.jet(&[0.5, 2.0]).unwrap();
        assert_eq!(jet.g_at(0, 0), 1.05);
        assert_eq!(jet.g_at(1, 1), 1.0);
        assert_eq!(jet.dg[0][0], 0.1);
        assert_eq!(jet.dg[1][0], 0.0);
    }

    #[test]
    fn rejects_non_spd() {
        let bad = MetricField::new(2, |_x| MetricJet {
            n: 2,
            g: vec![1.0, 2.0, 2.0, 1.0], // indefinite
            dg: vec![vec![0.0; 4]; 2],
            d2g: vec![vec![vec![0.0; 4]; 2]; 2],
        });
        assert!(bad.jet(&[0.0, 0.0]).is_err());
    }
}
