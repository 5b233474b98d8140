//! Small dense matrices over a generic symbol scalar (dimension <= 3 in
//! practice; nothing here assumes that except the adjugate inverse).

use super::scalar::SymbolScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SMat<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: SymbolScalar> SMat<T> {
    pub fn zeros(n: usize) -> Self {
        SMat {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn scale(&self, s: T) -> Self {
        SMat {
            n: self.n,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        SMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self[(i, k)] * o[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    /// Outer product u v^T.
    pub fn outer(u: &[T], v: &[T]) -> Self {
        let n = u.len();
        Self::from_fn(n, |i, j| u[i] * v[j])
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            acc = acc + self[(i, i)];
        }
        acc
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.n {
                    acc = acc + self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    /// Adjugate-based inverse for n <= 3.
    pub fn inverse_small(&self) -> Self {
        match self.n {
            1 => SMat {
                n: 1,
                data: vec![T::one() / self.data[0]],
            },
            2 => {
                let (a, b, c, d) = (self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)]);
                let det = a * d - b * c;
                let mut m = Self::zeros(2);
                m[(0, 0)] = d / det;
                m[(0, 1)] = -b / det;
                m[(1, 0)] = -c / det;
                m[(1, 1)] = a / det;
                m
            }
            3 => {
                let m = |i: usize, j: usize| self[(i, j)];
                let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                    - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                    + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
                let mut out = Self::zeros(3);
                for i in 0..3 {
                    for j in 0..3 {
                        let (r0, r1) = match i {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let (c0, c1) = match j {
                            0 => (1, 2),
                            1 => (0, 2),
                            _ => (0, 1),
                        };
                        let cof = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
                        let sign = if (i + j) % 2 == 0 { T::one() } else { -T::one() };
                        out[(j, i)] = sign * cof / det;
                    }
                }
                out
            }
            _ => panic!("inverse_small supports n <= 3"),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for SMat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn inverse_2x2_and_3x3() {
        let m = SMat {
            n: 2,
            data: vec![c(2.0), c(1.0), c(1.0), c(3.0)],
        };
        let inv = m.inverse_small();
        let id = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)].re - expect).abs() < 1e-14);
            }
        }
        let m3 = SMat {
            n: 3,
            data: vec![
                c(2.0),
                c(0.3),
                c(-0.1),
                c(0.3),
                c(1.5),
                c(0.2),
                c(-0.1),
                c(0.2),
                c(1.1),
            ],
        };
        let id3 = m3.matmul(&m3.inverse_small());
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id3[(i, j)].re - expect).abs() < 1e-13);
                assert!(id3[(i, j)].im.abs() < 1e-13);
            }
        }
    }
}
