//! Graded symbols of the resolvent parametrix for the Navier-Lame operator.
//!
//! Conventions, pinned once:
//! * Fourier sign: d/dx_l <-> i xi_l, so D_x = -i d/dx in the composition
//!   calculus.
//! * a_k (k = 2, 1, 0) are the graded symbol components of tau I - P, with
//!   tau of parabolic order 2; so a_2 = tau - p_2, a_1 = -p_1, a_0 = -p_0,
//!   and q_{-2} = a_2^{-1}.
//! * The q_{-4} sum enumerates exactly the admissible triples
//!   (j, k, |alpha|) with j < 2 and j + |alpha| - k = 0:
//!   (1,1,0), (0,0,0), (1,2,1), (0,1,1), (0,2,2); the enumeration is
//!   materialized in `q4_terms` so every term is auditable in the CLI
//!   output.
//! * The order-0 curvature action on displacements is omitted: it vanishes
//!   identically for every metric shipped here (flat, and the synthetic
//!   perturbation, which is flat in curved coordinates).

use super::metric::{MetricField, MetricJet};
use super::scalar::{HyperDual, SymbolScalar};
use super::smat::SMat;
use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use num_complex::Complex64;

pub type CMat = SMat<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeBackend {
    /// Hyperdual propagation through the closed-form symbol algebra; exact
    /// to rounding.
    Dual,
    /// Central differences on the plain evaluators; cross-validation route.
    CentralDifference,
}

/// Metric data seeded into the generic scalar type: component values and
/// first derivatives (all the symbol formulas up to q_{-3} need).
struct SeededMetric<T> {
    n: usize,
    g: SMat<T>,
    dg: Vec<SMat<T>>,
}

fn seed_plain(jet: &MetricJet) -> SeededMetric<Complex64> {
    let n = jet.n;
    let g = SMat::from_fn(n, |j, k| Complex64::new(jet.g[j * n + k], 0.0));
    let dg = (0..n)
        .map(|l| SMat::from_fn(n, |j, k| Complex64::new(jet.dg[l][j * n + k], 0.0)))
        .collect();
    SeededMetric { n, g, dg }
}

/// Seed hyperduals for directional derivatives along x_{dir1} (slot 1) and
/// x_{dir2} (slot 2). Only first derivatives of dg are populated (via d2g);
/// the mixed slot of dg would need third metric derivatives and is never
/// used by the formulas evaluated under duals.
fn seed_dual(jet: &MetricJet, dir1: Option<usize>, dir2: Option<usize>) -> SeededMetric<HyperDual> {
    let n = jet.n;
    let at = |m: &Vec<f64>, j: usize, k: usize| m[j * n + k];
    let g = SMat::from_fn(n, |j, k| HyperDual {
        v: Complex64::new(at(&jet.g, j, k), 0.0),
        d1: Complex64::new(dir1.map_or(0.0, |l| at(&jet.dg[l], j, k)), 0.0),
        d2: Complex64::new(dir2.map_or(0.0, |m| at(&jet.dg[m], j, k)), 0.0),
        d12: Complex64::new(
            match (dir1, dir2) {
                (Some(l), Some(m)) => at(&jet.d2g[l][m], j, k),
                _ => 0.0,
            },
            0.0,
        ),
    });
    let dg = (0..n)
        .map(|p| {
            SMat::from_fn(n, |j, k| HyperDual {
                v: Complex64::new(at(&jet.dg[p], j, k), 0.0),
                d1: Complex64::new(dir1.map_or(0.0, |l| at(&jet.d2g[p][l], j, k)), 0.0),
                d2: Complex64::new(dir2.map_or(0.0, |m| at(&jet.d2g[p][m], j, k)), 0.0),
                d12: Complex64::ZERO,
            })
        })
        .collect();
    SeededMetric { n, g, dg }
}

/// eta = G xi (index raised) and |xi|^2_g = xi . eta.
fn raise<T: SymbolScalar>(g: &SMat<T>, xi: &[T]) -> (Vec<T>, T) {
    let eta = g.apply(xi);
    let mut norm2 = T::zero();
    for (a, b) in xi.iter().zip(&eta) {
        norm2 = norm2 + *a * *b;
    }
    (eta, norm2)
}

/// Principal symbol of P: mu |xi|^2_g I + (mu + lambda) eta xi^T.
fn p2_symbol<T: SymbolScalar>(m: &ElasticModuli, g: &SMat<T>, xi: &[T]) -> SMat<T> {
    let (eta, norm2) = raise(g, xi);
    let mu = T::from_real(m.mu());
    let mul = T::from_real(m.mu() + m.lambda());
    SMat::identity(g.n)
        .scale(mu * norm2)
        .add(&SMat::outer(&eta, xi).scale(mul))
}

/// a_2 = tau I - p_2.
fn a2_symbol<T: SymbolScalar>(m: &ElasticModuli, g: &SMat<T>, xi: &[T], tau: T) -> SMat<T> {
    SMat::identity(g.n).scale(tau).sub(&p2_symbol(m, g, xi))
}

/// q_{-2} = a_2^{-1} in closed rank-one-update form:
/// (1/c) I + (mu + lambda)/(c d) eta xi^T with c = tau - mu |xi|^2 and
/// d = tau - (2 mu + lambda) |xi|^2.
fn q2_symbol<T: SymbolScalar>(m: &ElasticModuli, g: &SMat<T>, xi: &[T], tau: T) -> SMat<T> {
    let (eta, norm2) = raise(g, xi);
    let c = tau - T::from_real(m.s_speed_sq()) * norm2;
    let d = tau - T::from_real(m.p_speed_sq()) * norm2;
    let b = T::from_real(m.mu() + m.lambda());
    SMat::identity(g.n)
        .scale(T::one() / c)
        .add(&SMat::outer(&eta, xi).scale(b / (c * d)))
}

/// d a_2 / d xi_l = -[2 mu eta_l I + (mu+lambda)(G e_l xi^T + eta e_l^T)].
fn dxi_a2<T: SymbolScalar>(m: &ElasticModuli, g: &SMat<T>, xi: &[T], l: usize) -> SMat<T> {
    let n = g.n;
    let (eta, _) = raise(g, xi);
    let gcol: Vec<T> = (0..n).map(|j| g[(j, l)]).collect();
    let mut e_l = vec![T::zero(); n];
    e_l[l] = T::one();
    let two_mu = T::from_real(2.0 * m.mu());
    let mul = T::from_real(m.mu() + m.lambda());
    SMat::identity(n)
        .scale(two_mu * eta[l])
        .add(&SMat::outer(&gcol, xi).scale(mul))
        .add(&SMat::outer(&eta, &e_l).scale(mul))
        .scale(-T::one())
}

/// d^2 a_2 / d xi_l d xi_m = -[2 mu G_{lm} I + (mu+lambda)(G e_l e_m^T +
/// G e_m e_l^T)].
fn dxixi_a2<T: SymbolScalar>(
    m: &ElasticModuli,
    g: &SMat<T>,
    l: usize,
    mm: usize,
) -> SMat<T> {
    let n = g.n;
    let gl: Vec<T> = (0..n).map(|j| g[(j, l)]).collect();
    let gm: Vec<T> = (0..n).map(|j| g[(j, mm)]).collect();
    let mut e_l = vec![T::zero(); n];
    e_l[l] = T::one();
    let mut e_m = vec![T::zero(); n];
    e_m[mm] = T::one();
    let two_mu = T::from_real(2.0 * m.mu());
    let mul = T::from_real(m.mu() + m.lambda());
    SMat::identity(n)
        .scale(two_mu * g[(l, mm)])
        .add(&SMat::outer(&gl, &e_m).scale(mul))
        .add(&SMat::outer(&gm, &e_l).scale(mul))
        .scale(-T::one())
}

/// Connection-level data derived from the seeded metric: lower metric,
/// Christoffel symbols, log-volume gradient w_s, and the Laplacian drift
/// b^l. All first-order in metric derivatives.
struct Connection<T> {
    glo: SMat<T>,
    /// `gamma[j][(s, k)]` = Gamma^j_{sk}.
    gamma: Vec<SMat<T>>,
    /// `w[s]` = d_s log sqrt(det g_lower) = -1/2 Tr(g_lower dg[s]).
    w: Vec<T>,
    /// `b[l]` = sum_k d_k g^{kl} + g^{kl} w_k.
    b: Vec<T>,
}

fn connection<T: SymbolScalar>(sm: &SeededMetric<T>) -> Connection<T> {
    let n = sm.n;
    let glo = sm.g.inverse_small();
    // d_l g_lower = -glo dg[l] glo
    let dglo: Vec<SMat<T>> = (0..n)
        .map(|l| glo.matmul(&sm.dg[l]).matmul(&glo).scale(-T::one()))
        .collect();
    let half = T::from_real(0.5);
    let gamma: Vec<SMat<T>> = (0..n)
        .map(|j| {
            SMat::from_fn(n, |s, k| {
                let mut acc = T::zero();
                for m in 0..n {
                    acc = acc
                        + sm.g[(j, m)]
                            * (dglo[s][(m, k)] + dglo[k][(m, s)] - dglo[m][(s, k)]);
                }
                acc * half
            })
        })
        .collect();
    let w: Vec<T> = (0..n)
        .map(|s| {
            let mut acc = T::zero();
            for j in 0..n {
                for k in 0..n {
                    acc = acc + glo[(j, k)] * sm.dg[s][(j, k)];
                }
            }
            -half * acc
        })
        .collect();
    let b: Vec<T> = (0..n)
        .map(|l| {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + sm.dg[k][(k, l)] + sm.g[(k, l)] * w[k];
            }
            acc
        })
        .collect();
    Connection { glo, gamma, w, b }
}

/// Sub-principal symbol a_1 = -p_1:
/// a_1(j,s) = i [ mu (b . xi) delta_{js} + 2 mu g^{kl} Gamma^j_{sk} xi_l
///              + (mu + lambda) eta^j w_s ].
fn a1_symbol<T: SymbolScalar>(m: &ElasticModuli, sm: &SeededMetric<T>, xi: &[T]) -> SMat<T> {
    let n = sm.n;
    let conn = connection(sm);
    let (eta, _) = raise(&sm.g, xi);
    let mut b_dot_xi = T::zero();
    for l in 0..n {
        b_dot_xi = b_dot_xi + conn.b[l] * xi[l];
    }
    let i_unit = T::from_complex(Complex64::new(0.0, 1.0));
    let mu = T::from_real(m.mu());
    let two_mu = T::from_real(2.0 * m.mu());
    let mul = T::from_real(m.mu() + m.lambda());
    SMat::from_fn(n, |j, s| {
        let mut transport = T::zero();
        for k in 0..n {
            for l in 0..n {
                transport = transport + sm.g[(k, l)] * conn.gamma[j][(s, k)] * xi[l];
            }
        }
        let mut val = two_mu * transport + mul * eta[j] * conn.w[s];
        if j == s {
            val = val + mu * b_dot_xi;
        }
        i_unit * val
    })
}

/// d a_1 / d xi_l (a_1 is linear in xi).
fn dxi_a1<T: SymbolScalar>(m: &ElasticModuli, sm: &SeededMetric<T>, l: usize) -> SMat<T> {
    let n = sm.n;
    let conn = connection(sm);
    let i_unit = T::from_complex(Complex64::new(0.0, 1.0));
    let mu = T::from_real(m.mu());
    let two_mu = T::from_real(2.0 * m.mu());
    let mul = T::from_real(m.mu() + m.lambda());
    SMat::from_fn(n, |j, s| {
        let mut transport = T::zero();
        for k in 0..n {
            transport = transport + sm.g[(k, l)] * conn.gamma[j][(s, k)];
        }
        let mut val = two_mu * transport + mul * sm.g[(j, l)] * conn.w[s];
        if j == s {
            val = val + mu * conn.b[l];
        }
        i_unit * val
    })
}

/// Zeroth-order symbol a_0 = -p_0 = mu c^j_s + (mu+lambda) g^{jk} d_k w_s,
/// evaluated at plain scalars from the full jet (it needs second metric
/// derivatives but never gets differentiated itself).
fn a0_symbol(m: &ElasticModuli, jet: &MetricJet) -> CMat {
    let n = jet.n;
    let sm = seed_plain(jet);
    let conn = connection(&sm);
    let glo = &conn.glo;
    // d_k glo = -glo dg[k] glo
    let dglo: Vec<CMat> = (0..n)
        .map(|k| glo.matmul(&sm.dg[k]).matmul(glo).scale(-Complex64::ONE))
        .collect();
    let d2g_mat = |p: usize, k: usize| {
        SMat::from_fn(n, |j, s| Complex64::new(jet.d2g[p][k][j * n + s], 0.0))
    };
    // d_k dglo[s] = -(dglo[k] dg[s] glo + glo d2g[s][k] glo + glo dg[s] dglo[k])
    let ddglo = |s: usize, k: usize| -> CMat {
        dglo[k]
            .matmul(&sm.dg[s])
            .matmul(glo)
            .add(&glo.matmul(&d2g_mat(s, k)).matmul(glo))
            .add(&glo.matmul(&sm.dg[s]).matmul(&dglo[k]))
            .scale(-Complex64::ONE)
    };
    // d_k Gamma^j_{sl} = 1/2 [ dg[k]^{jm} (...) + g^{jm} d_k (...) ]
    let dgamma = |j: usize, s: usize, l: usize, k: usize| -> Complex64 {
        let mut acc = Complex64::ZERO;
        for mm in 0..n {
            let sym = dglo[s][(mm, l)] + dglo[l][(mm, s)] - dglo[mm][(s, l)];
            let dsym =
                ddglo(s, k)[(mm, l)] + ddglo(l, k)[(mm, s)] - ddglo(mm, k)[(s, l)];
            acc += 0.5 * (sm.dg[k][(j, mm)] * sym + sm.g[(j, mm)] * dsym);
        }
        acc
    };
    // d_k w_s = -1/2 Tr(dglo[k] dg[s] + glo d2g[s][k])
    let dw = |s: usize, k: usize| -> Complex64 {
        let mut acc = Complex64::ZERO;
        for a in 0..n {
            for b in 0..n {
                acc += dglo[k][(a, b)] * sm.dg[s][(a, b)] + glo[(a, b)] * d2g_mat(s, k)[(a, b)];
            }
        }
        -0.5 * acc
    };
    let mu = Complex64::new(m.mu(), 0.0);
    let mul = Complex64::new(m.mu() + m.lambda(), 0.0);
    SMat::from_fn(n, |j, s| {
        // c^j_s = g^{kl} d_k Gamma^j_{sl} + g^{kl}(Gamma^j_{hl} Gamma^h_{sk}
        //         - Gamma^j_{sh} Gamma^h_{kl})
        let mut c = Complex64::ZERO;
        for k in 0..n {
            for l in 0..n {
                c += sm.g[(k, l)] * dgamma(j, s, l, k);
                for h in 0..n {
                    c += sm.g[(k, l)]
                        * (conn.gamma[j][(h, l)] * conn.gamma[h][(s, k)]
                            - conn.gamma[j][(s, h)] * conn.gamma[h][(k, l)]);
                }
            }
        }
        let mut graddiv = Complex64::ZERO;
        for k in 0..n {
            graddiv += sm.g[(j, k)] * dw(s, k);
        }
        mu * c + mul * graddiv
    })
}

/// Analytic x-derivative of q_{-2} along x_l, valid over any scalar type
/// (chain rule through c, d, eta).
fn dx_q2_analytic<T: SymbolScalar>(
    m: &ElasticModuli,
    sm: &SeededMetric<T>,
    xi: &[T],
    tau: T,
    l: usize,
) -> SMat<T> {
    let n = sm.n;
    let (eta, norm2) = raise(&sm.g, xi);
    let c = tau - T::from_real(m.s_speed_sq()) * norm2;
    let d = tau - T::from_real(m.p_speed_sq()) * norm2;
    let b = T::from_real(m.mu() + m.lambda());
    // d_l |xi|^2_g = xi^T dg[l] xi; d_l eta = dg[l] xi
    let deta = sm.dg[l].apply(xi);
    let mut dnorm2 = T::zero();
    for (a, v) in xi.iter().zip(&deta) {
        dnorm2 = dnorm2 + *a * *v;
    }
    let dc = -T::from_real(m.s_speed_sq()) * dnorm2;
    let dd = -T::from_real(m.p_speed_sq()) * dnorm2;
    // d (1/c) = -dc / c^2 ; d (b/(c d)) = -b (dc d + c dd) / (c d)^2
    let cd = c * d;
    let term1 = SMat::identity(n).scale(-dc / (c * c));
    let term2 = SMat::outer(&deta, xi).scale(b / cd);
    let term3 = SMat::outer(&eta, xi).scale(-b * (dc * d + c * dd) / (cd * cd));
    term1.add(&term2).add(&term3)
}

/// q_{-3} = -q_{-2} (a_1 q_{-2} - i sum_l d_{xi_l} a_2 d_{x_l} q_{-2}),
/// generic over the scalar type so it can be evaluated under duals.
fn q3_generic<T: SymbolScalar>(
    m: &ElasticModuli,
    sm: &SeededMetric<T>,
    xi: &[T],
    tau: T,
) -> SMat<T> {
    let n = sm.n;
    let q2 = q2_symbol(m, &sm.g, xi, tau);
    let a1 = a1_symbol(m, sm, xi);
    let mut inner = a1.matmul(&q2);
    let minus_i = T::from_complex(Complex64::new(0.0, -1.0));
    for l in 0..n {
        let da2 = dxi_a2(m, &sm.g, xi, l);
        let dq2 = dx_q2_analytic(m, sm, xi, tau, l);
        inner = inner.add(&da2.matmul(&dq2).scale(minus_i));
    }
    q2.matmul(&inner).scale(-T::one())
}

/// One enumerated term of the q_{-4} sum, kept for the audit trail.
#[derive(Debug, Clone)]
pub struct Q4Term {
    /// (j, k, alpha) in the constraint j < 2, j + |alpha| - k = 0.
    pub j: usize,
    pub k: usize,
    pub alpha: Vec<usize>,
    pub description: String,
}

/// The admissible index set of the q_{-4} recursion, materialized.
pub fn q4_terms(n: usize) -> Vec<Q4Term> {
    let mut terms = vec![
        Q4Term {
            j: 1,
            k: 1,
            alpha: vec![],
            description: "a_1 q_{-3}".into(),
        },
        Q4Term {
            j: 0,
            k: 0,
            alpha: vec![],
            description: "a_0 q_{-2}".into(),
        },
    ];
    for l in 0..n {
        terms.push(Q4Term {
            j: 1,
            k: 2,
            alpha: vec![l],
            description: format!("d_xi{l} a_2 . D_x{l} q_(-3)"),
        });
        terms.push(Q4Term {
            j: 0,
            k: 1,
            alpha: vec![l],
            description: format!("d_xi{l} a_1 . D_x{l} q_(-2)"),
        });
    }
    for l in 0..n {
        for mm in l..n {
            terms.push(Q4Term {
                j: 0,
                k: 2,
                alpha: vec![l, mm],
                description: format!("d2_xi{l}xi{mm} a_2 . D2_x{l}x{mm} q_(-2) / alpha!"),
            });
        }
    }
    terms
}

/// Evaluation context: moduli, metric field, and the derivative backend
/// used for the x-derivatives the recursion needs.
#[derive(Debug, Clone)]
pub struct SymbolContext {
    pub moduli: ElasticModuli,
    pub metric: MetricField,
    pub backend: DerivativeBackend,
    /// Central-difference step scale (ignored by the dual backend).
    pub fd_step: f64,
}

impl SymbolContext {
    pub fn new(moduli: ElasticModuli, metric: MetricField) -> Self {
        SymbolContext {
            moduli,
            metric,
            backend: DerivativeBackend::Dual,
            fd_step: 1e-5,
        }
    }

    pub fn with_backend(mut self, backend: DerivativeBackend) -> Self {
        self.backend = backend;
        self
    }

    fn dim(&self) -> usize {
        self.metric.dimension()
    }

    fn check_xi(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim() {
            return Err(Error::Config(format!(
                "covector dimension {} does not match metric dimension {}",
                xi.len(),
                self.dim()
            )));
        }
        if xi.iter().all(|&v| v == 0.0) {
            return Err(Error::Range("principal symbol needs xi != 0".into()));
        }
        Ok(())
    }

    fn cvec(xi: &[f64]) -> Vec<Complex64> {
        xi.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }

    /// mu |xi|^2_g I + (mu + lambda) [g^{jm} xi_m xi_k]_{jk}; real-valued.
    pub fn principal_symbol(&self, x: &[f64], xi: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_xi(xi)?;
        let jet = self.metric.jet(x)?;
        let sm = seed_plain(&jet);
        let p2 = p2_symbol(&self.moduli, &sm.g, &Self::cvec(xi));
        let n = self.dim();
        Ok((0..n)
            .map(|i| (0..n).map(|j| p2[(i, j)].re).collect())
            .collect())
    }

    fn pole_check(&self, jet: &MetricJet, xi: &[f64], tau: Complex64) -> Result<()> {
        let sm = seed_plain(jet);
        let (_, norm2) = raise(&sm.g, &Self::cvec(xi));
        for pole in [
            norm2 * self.moduli.s_speed_sq(),
            norm2 * self.moduli.p_speed_sq(),
        ] {
            if (tau - pole).norm() < 1e-10 * tau.norm().max(pole.norm()) {
                return Err(Error::Conditioning(format!(
                    "tau = {tau} within 1e-10 of resolvent pole {pole}"
                )));
            }
        }
        Ok(())
    }

    /// q_{-2}(x, xi, tau) = (tau I - principal)^{-1} in closed form.
    pub fn resolvent_principal(&self, x: &[f64], xi: &[f64], tau: Complex64) -> Result<CMat> {
        self.check_xi(xi)?;
        let jet = self.metric.jet(x)?;
        self.pole_check(&jet, xi, tau)?;
        let sm = seed_plain(&jet);
        Ok(q2_symbol(&self.moduli, &sm.g, &Self::cvec(xi), tau))
    }

    /// q_{-3}(x, xi, tau); identically zero at the flat metric.
    pub fn q_minus_3(&self, x: &[f64], xi: &[f64], tau: Complex64) -> Result<CMat> {
        self.check_xi(xi)?;
        let jet = self.metric.jet(x)?;
        self.pole_check(&jet, xi, tau)?;
        let sm = seed_plain(&jet);
        Ok(q3_generic(&self.moduli, &sm, &Self::cvec(xi), tau))
    }

    /// D_{x_l} q_{-2} = -i d_{x_l} q_{-2} via the selected backend.
    fn dx_q2(&self, x: &[f64], xi: &[f64], tau: Complex64, l: usize) -> Result<CMat> {
        match self.backend {
            DerivativeBackend::Dual => {
                let jet = self.metric.jet(x)?;
                let sm = seed_plain(&jet);
                Ok(dx_q2_analytic(&self.moduli, &sm, &Self::cvec(xi), tau, l))
            }
            DerivativeBackend::CentralDifference => {
                let h = self.fd_step * (1.0 + x[l].abs());
                let mut xp = x.to_vec();
                xp[l] += h;
                let mut xm = x.to_vec();
                xm[l] -= h;
                let qp = self.resolvent_principal(&xp, xi, tau)?;
                let qm = self.resolvent_principal(&xm, xi, tau)?;
                let out = qp.sub(&qm).scale(Complex64::new(1.0 / (2.0 * h), 0.0));
                if out.data.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Differentiation {
                        step: h,
                        reason: "central difference of q_{-2} produced non-finite values".into(),
                    });
                }
                Ok(out)
            }
        }
    }

    /// First x-derivative of q_{-3} along x_l.
    fn dx_q3(&self, x: &[f64], xi: &[f64], tau: Complex64, l: usize) -> Result<CMat> {
        match self.backend {
            DerivativeBackend::Dual => {
                let jet = self.metric.jet(x)?;
                let sm = seed_dual(&jet, Some(l), None);
                let xi_d: Vec<HyperDual> =
                    xi.iter().map(|&v| HyperDual::from_real(v)).collect();
                let q3 = q3_generic(&self.moduli, &sm, &xi_d, HyperDual::constant(tau));
                Ok(SMat {
                    n: q3.n,
                    data: q3.data.iter().map(|h| h.d1).collect(),
                })
            }
            DerivativeBackend::CentralDifference => {
                let h = self.fd_step * (1.0 + x[l].abs());
                let mut xp = x.to_vec();
                xp[l] += h;
                let mut xm = x.to_vec();
                xm[l] -= h;
                let qp = self.q_minus_3(&xp, xi, tau)?;
                let qm = self.q_minus_3(&xm, xi, tau)?;
                let out = qp.sub(&qm).scale(Complex64::new(1.0 / (2.0 * h), 0.0));
                if out.data.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Differentiation {
                        step: h,
                        reason: "central difference of q_{-3} produced non-finite values".into(),
                    });
                }
                Ok(out)
            }
        }
    }

    /// Second x-derivative of q_{-2} along (x_l, x_m).
    fn d2x_q2(&self, x: &[f64], xi: &[f64], tau: Complex64, l: usize, mm: usize) -> Result<CMat> {
        match self.backend {
            DerivativeBackend::Dual => {
                let jet = self.metric.jet(x)?;
                let sm = seed_dual(&jet, Some(l), Some(mm));
                let xi_d: Vec<HyperDual> =
                    xi.iter().map(|&v| HyperDual::from_real(v)).collect();
                let q2 = q2_symbol(
                    &self.moduli,
                    &sm.g,
                    &xi_d,
                    HyperDual::constant(tau),
                );
                Ok(SMat {
                    n: q2.n,
                    data: q2.data.iter().map(|h| h.d12).collect(),
                })
            }
            DerivativeBackend::CentralDifference => {
                let h = self.fd_step.sqrt() * (1.0 + x[l].abs().max(x[mm].abs()));
                let shift = |dl: f64, dm: f64| -> Vec<f64> {
                    let mut xx = x.to_vec();
                    xx[l] += dl * h;
                    xx[mm] += dm * h;
                    xx
                };
                let out = if l == mm {
                    let qp = self.resolvent_principal(&shift(1.0, 0.0), xi, tau)?;
                    let q0 = self.resolvent_principal(x, xi, tau)?;
                    let qm = self.resolvent_principal(&shift(-1.0, 0.0), xi, tau)?;
                    qp.add(&qm)
                        .sub(&q0.scale(Complex64::new(2.0, 0.0)))
                        .scale(Complex64::new(1.0 / (h * h), 0.0))
                } else {
                    let qpp = self.resolvent_principal(&shift(1.0, 1.0), xi, tau)?;
                    let qpm = self.resolvent_principal(&shift(1.0, -1.0), xi, tau)?;
                    let qmp = self.resolvent_principal(&shift(-1.0, 1.0), xi, tau)?;
                    let qmm = self.resolvent_principal(&shift(-1.0, -1.0), xi, tau)?;
                    qpp.sub(&qpm)
                        .sub(&qmp)
                        .add(&qmm)
                        .scale(Complex64::new(1.0 / (4.0 * h * h), 0.0))
                };
                if out.data.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Differentiation {
                        step: h,
                        reason: "second difference of q_{-2} produced non-finite values".into(),
                    });
                }
                Ok(out)
            }
        }
    }

    /// q_{-4} = -q_{-2} sum over the admissible (j, k, alpha) triples of
    /// (d^alpha_xi a_k)(D^alpha_x q_{-2-j}) / alpha!; degree -4 homogeneous,
    /// zero at the flat metric.
    pub fn q_minus_4(&self, x: &[f64], xi: &[f64], tau: Complex64) -> Result<CMat> {
        self.check_xi(xi)?;
        let n = self.dim();
        let jet = self.metric.jet(x)?;
        self.pole_check(&jet, xi, tau)?;
        let sm = seed_plain(&jet);
        let xi_c = Self::cvec(xi);
        let q2 = q2_symbol(&self.moduli, &sm.g, &xi_c, tau);
        let q3 = q3_generic(&self.moduli, &sm, &xi_c, tau);
        let a1 = a1_symbol(&self.moduli, &sm, &xi_c);
        let a0 = a0_symbol(&self.moduli, &jet);
        let minus_i = Complex64::new(0.0, -1.0);

        // (1,1,0): a_1 q_{-3} and (0,0,0): a_0 q_{-2}
        let mut sum = a1.matmul(&q3).add(&a0.matmul(&q2));
        for l in 0..n {
            // (1,2,|1|): d_xi a_2 . D_x q_{-3}
            let da2 = dxi_a2(&self.moduli, &sm.g, &xi_c, l);
            let dq3 = self.dx_q3(x, xi, tau, l)?.scale(minus_i);
            sum = sum.add(&da2.matmul(&dq3));
            // (0,1,|1|): d_xi a_1 . D_x q_{-2}
            let da1 = dxi_a1(&self.moduli, &sm, l);
            let dq2 = self.dx_q2(x, xi, tau, l)?.scale(minus_i);
            sum = sum.add(&da1.matmul(&dq2));
        }
        // (0,2,|2|): D^2 = (-i)^2 d^2 = -d^2; alpha! = 2 on the diagonal.
        for l in 0..n {
            for mm in l..n {
                let dda2 = dxixi_a2(&self.moduli, &sm.g, l, mm);
                let ddq2 = self.d2x_q2(x, xi, tau, l, mm)?;
                let factor = if l == mm { -0.5 } else { -1.0 };
                sum = sum.add(&dda2.matmul(&ddq2).scale(Complex64::new(factor, 0.0)));
            }
        }
        Ok(q2.matmul(&sum).scale(-Complex64::ONE))
    }

    /// Backend cross-validation helper: d_{x_l} q_{-2} with an explicitly
    /// chosen backend.
    pub fn dx_resolvent_with(
        &self,
        backend: DerivativeBackend,
        x: &[f64],
        xi: &[f64],
        tau: Complex64,
        l: usize,
    ) -> Result<CMat> {
        let ctx = self.clone().with_backend(backend);
        ctx.dx_q2(x, xi, tau, l)
    }

    /// d a_2 / d xi_l, exposed for the backend cross-validation invariant.
    pub fn dxi_a2_analytic(&self, x: &[f64], xi: &[f64], l: usize) -> Result<CMat> {
        let jet = self.metric.jet(x)?;
        let sm = seed_plain(&jet);
        Ok(dxi_a2(&self.moduli, &sm.g, &Self::cvec(xi), l))
    }

    /// Central-difference d a_2 / d xi_l (the other side of the
    /// cross-validation).
    pub fn dxi_a2_central(&self, x: &[f64], xi: &[f64], tau: Complex64, l: usize) -> Result<CMat> {
        let jet = self.metric.jet(x)?;
        let sm = seed_plain(&jet);
        let h = self.fd_step * (1.0 + xi[l].abs());
        let mut xp = Self::cvec(xi);
        xp[l] += Complex64::new(h, 0.0);
        let mut xm = Self::cvec(xi);
        xm[l] -= Complex64::new(h, 0.0);
        let ap = a2_symbol(&self.moduli, &sm.g, &xp, tau);
        let am = a2_symbol(&self.moduli, &sm.g, &xm, tau);
        Ok(ap.sub(&am).scale(Complex64::new(1.0 / (2.0 * h), 0.0)))
    }
}
