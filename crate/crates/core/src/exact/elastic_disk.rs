//! In-plane elastic eigenvalues of a disk via Helmholtz-potential dispersion
//! relations.
//!
//! The displacement splits as u = grad(phi) + curl(psi e_z) with potentials
//! phi = J_n(alpha r) cos(n theta), psi = J_n(beta r) sin(n theta), where
//! alpha^2 = tau / (2 mu + lambda) and beta^2 = tau / mu. Imposing the
//! boundary rows on (u_r, u_theta) for the clamped case, or on
//! (sigma_rr, sigma_r theta) for the traction-free case, gives a 2x2
//! determinant per angular order whose zeros are the eigenvalues. The full
//! derivation, including the order-0 factorization into torsional and radial
//! families, is written out in docs/disk-dispersion.md.

use super::rootscan::{bisect_root, scan_roots};

use super::{weyl_certificate, WeylCertificate};
use crate::asymptotics::{counting_coefficients, GeometryData};
use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use crate::special::bessel_j_pair;
use crate::spectrum::{
    BoundaryCondition, ModeFamily, ModeIndex, SpectrumEntry, SpectrumSource, SpectrumTable,
};

/// Scan step in the dimensionless variable s = beta * radius. Roots of each
/// determinant interleave two Bessel-zero ladders whose spacings are
/// pi and pi * sqrt((2 mu + lambda) / mu); a tenth of the combined spacing
/// oversamples both.
const ROOT_TOL: f64 = 1e-12;

fn base_step(moduli: &ElasticModuli) -> f64 {
    let gamma = (moduli.s_speed_sq() / moduli.p_speed_sq()).sqrt(); // alpha/beta <= 1
    let combined = std::f64::consts::PI / (1.0 + 1.0 / gamma.max(1e-3));
    0.2 * combined
}

/// Wavenumbers (alpha, beta) for spectral parameter tau > 0, positive branch.
fn wavenumbers(moduli: &ElasticModuli, tau: f64) -> (f64, f64) {
    (
        (tau / moduli.p_speed_sq()).sqrt(),
        (tau / moduli.s_speed_sq()).sqrt(),
    )
}

/// Boundary determinant D_n(tau) for the clamped (Dirichlet) disk:
/// rows are u_r and u_theta at r = a.
fn dirichlet_det(moduli: &ElasticModuli, radius: f64, n: u32, tau: f64) -> f64 {
    let (alpha, beta) = wavenumbers(moduli, tau);
    let (ja, jpa) = bessel_j_pair(n, alpha * radius).expect("dispersion argument in range");
    let (jb, jpb) = bessel_j_pair(n, beta * radius).expect("dispersion argument in range");
    let nf = n as f64;
    alpha * beta * jpa * jpb - (nf * nf / (radius * radius)) * ja * jb
}

/// Traction rows for the free (Neumann) disk; returns the 2x2 entries
/// (t11, t12, t21, t22) with rows (sigma_rr, sigma_r theta) / mu and columns
/// (pressure potential, shear potential).
fn traction_rows(moduli: &ElasticModuli, radius: f64, n: u32, tau: f64) -> (f64, f64, f64, f64) {
    let (alpha, beta) = wavenumbers(moduli, tau);
    let a = radius;
    let nf = n as f64;
    let (ja, jpa) = bessel_j_pair(n, alpha * a).expect("dispersion argument in range");
    let (jb, jpb) = bessel_j_pair(n, beta * a).expect("dispersion argument in range");
    let b2 = beta * beta;
    let t11 = (2.0 * nf * nf / (a * a) - b2) * ja - (2.0 * alpha / a) * jpa;
    let t12 = (2.0 * nf / a) * (beta * jpb - jb / a);
    let t21 = (2.0 * nf / a) * (alpha * jpa - ja / a);
    let t22 = (2.0 * nf * nf / (a * a) - b2) * jb - (2.0 * beta / a) * jpb;
    (t11, t12, t21, t22)
}

fn neumann_det(moduli: &ElasticModuli, radius: f64, n: u32, tau: f64) -> f64 {
    let (t11, t12, t21, t22) = traction_rows(moduli, radius, n, tau);
    t11 * t22 - t12 * t21
}

/// Value of the 2x2 boundary determinant for angular order n at spectral
/// parameter tau > 0. Zeros in tau are exactly the elastic eigenvalues of
/// that order; the function is real-analytic on (0, inf) so sign changes
/// bracket roots reliably.
pub fn elastic_disk_dispersion(
    moduli: &ElasticModuli,
    radius: f64,
    bc: BoundaryCondition,
    angular_order: u32,
    tau: f64,
) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Range(format!(
            "dispersion evaluation needs tau > 0, got {tau}"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::Config(format!("radius must be positive: {radius}")));
    }
    Ok(match bc {
        BoundaryCondition::Dirichlet => dirichlet_det(moduli, radius, angular_order, tau),
        BoundaryCondition::Neumann => neumann_det(moduli, radius, angular_order, tau),
    })
}

/// Scan with step halving until the root count stabilizes: the determinant
/// mixes two oscillation ladders (pressure and shear wavenumbers), and a
/// near-coincident pair of roots inside one step cancels its sign changes.
/// Halving until two consecutive resolutions agree recovers such pairs.
fn scan_until_stable<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step0: f64) -> Vec<f64> {
    let mut step = step0;
    let mut roots = scan_roots(&f, lo, hi, step, ROOT_TOL);
    for _ in 0..6 {
        step *= 0.5;
        let finer = scan_roots(&f, lo, hi, step, ROOT_TOL);
        if finer.len() == roots.len() {
            return finer;
        }
        roots = finer;
    }
    roots
}

/// Roots in the scan variable s = beta * radius for one angular order.
/// Order 0 decouples into two one-dimensional families which are scanned
/// separately (their product can have double roots that a sign scan on the
/// determinant would miss).
fn order_roots(
    moduli: &ElasticModuli,
    radius: f64,
    bc: BoundaryCondition,
    n: u32,
    s_max: f64,
    step: f64,
) -> Vec<f64> {
    let tau_of_s = move |s: f64| moduli.s_speed_sq() * (s / radius) * (s / radius);
    let s_min = 1e-2;
    if s_max <= s_min {
        return Vec::new();
    }
    if n == 0 {
        let mut roots = match bc {
            BoundaryCondition::Dirichlet => {
                // Radial family J_0'(alpha a) = 0 and torsional family
                // J_0'(beta a) = 0.
                let gamma = (moduli.s_speed_sq() / moduli.p_speed_sq()).sqrt();
                let mut r = scan_until_stable(
                    |s| bessel_j_pair(0, gamma * s).unwrap().1,
                    s_min,
                    s_max,
                    step,
                );
                r.extend(scan_until_stable(
                    |s| bessel_j_pair(0, s).unwrap().1,
                    s_min,
                    s_max,
                    step,
                ));
                r
            }
            BoundaryCondition::Neumann => {
                let mut r = scan_until_stable(
                    |s| {
                        let (t11, _, _, _) = traction_rows(moduli, radius, 0, tau_of_s(s));
                        t11
                    },
                    s_min,
                    s_max,
                    step,
                );
                r.extend(scan_until_stable(
                    |s| {
                        let (_, _, _, t22) = traction_rows(moduli, radius, 0, tau_of_s(s));
                        t22
                    },
                    s_min,
                    s_max,
                    step,
                ));
                r
            }
        };
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots
    } else {
        let det = |s: f64| match bc {
            BoundaryCondition::Dirichlet => dirichlet_det(moduli, radius, n, tau_of_s(s)),
            BoundaryCondition::Neumann => neumann_det(moduli, radius, n, tau_of_s(s)),
        };
        scan_until_stable(det, s_min, s_max, step)
    }
}

fn build_table(
    moduli: &ElasticModuli,
    radius: f64,
    bc: BoundaryCondition,
    lambda_max: f64,
    step: f64,
) -> Result<SpectrumTable> {
    let s_max = radius * (lambda_max / moduli.s_speed_sq()).sqrt();
    let mut entries = Vec::new();
    if bc == BoundaryCondition::Neumann {
        // Rigid motions: two translations (order 1) + one rotation (order 0).
        entries.push(SpectrumEntry {
            eigenvalue: 0.0,
            multiplicity: 2,
            mode: ModeIndex {
                family: ModeFamily::Elastic,
                angular_order: 1,
                radial_index: 0,
            },
        });
        entries.push(SpectrumEntry {
            eigenvalue: 0.0,
            multiplicity: 1,
            mode: ModeIndex {
                family: ModeFamily::Elastic,
                angular_order: 0,
                radial_index: 0,
            },
        });
    }
    let mut n = 0u32;
    let mut consecutive_empty = 0u32;
    // Hard order ceiling: every branch, including the slow boundary wave,
    // has first root above ~(c_R n / a)^2 with c_R >= 0.5 sqrt(mu), so
    // orders beyond ~2 s_max contribute nothing below lambda_max.
    let order_ceiling = (2.0 * s_max).ceil() as u32 + 5;
    loop {
        let roots = order_roots(moduli, radius, bc, n, s_max, step);
        let mult = if n == 0 { 1 } else { 2 };
        let mut used = 0usize;
        for (k, s) in roots.iter().enumerate() {
            // Polish in tau to the stated relative tolerance.
            let tau = moduli.s_speed_sq() * (s / radius) * (s / radius);
            if tau <= lambda_max {
                used += 1;
                entries.push(SpectrumEntry {
                    eigenvalue: tau,
                    multiplicity: mult,
                    mode: ModeIndex {
                        family: ModeFamily::Elastic,
                        angular_order: n,
                        radial_index: (k + 1) as u32,
                    },
                });
            }
        }
        if used == 0 {
            consecutive_empty += 1;
            // The first root per order increases with the order along every
            // branch (including the slower Rayleigh branch on the free
            // boundary), so a short run of empty orders ends the sweep.
            if consecutive_empty >= 3 && n > 2 {
                break;
            }
        } else {
            consecutive_empty = 0;
        }
        n += 1;
        if n > order_ceiling {
            break;
        }
        if n > crate::special::MAX_ORDER {
            return Err(Error::Range(
                "lambda_max requires angular orders beyond the supported Bessel range".into(),
            ));
        }
    }
    SpectrumTable::new(entries, bc, SpectrumSource::Dispersion, lambda_max)
}

/// All elastic disk eigenvalues up to `lambda_max`, with multiplicities
/// (2 for angular order >= 1, 1 for order 0; the traction-free table starts
/// with tau = 0 at multiplicity 3 for the rigid motions). The table is
/// certified against the Weyl count before being returned.
pub fn elastic_disk_spectrum(
    moduli: &ElasticModuli,
    radius: f64,
    bc: BoundaryCondition,
    lambda_max: f64,
) -> Result<SpectrumTable> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::Config(format!(
            "lambda_max must be positive, got {lambda_max}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Config(format!(
            "disk radius must be positive, got {radius}"
        )));
    }
    let geom = GeometryData::disk(radius);
    let coeff = counting_coefficients(moduli, &geom, bc)?;
    let step = base_step(moduli);
    let table = build_table(moduli, radius, bc, lambda_max, step)?;
    let cert = weyl_certificate(&table, 2, coeff.a0, coeff.a1.abs());
    if cert.passed {
        return Ok(table);
    }
    let table = build_table(moduli, radius, bc, lambda_max, step / 4.0)?;
    let cert = weyl_certificate(&table, 2, coeff.a0, coeff.a1.abs());
    if !cert.passed {
        return Err(super::scalar_disk::certification_error(&cert));
    }
    Ok(table)
}

/// Expose the certificate for reporting purposes (CLI certification record).
pub fn certify_elastic_table(
    moduli: &ElasticModuli,
    radius: f64,
    table: &SpectrumTable,
) -> Result<WeylCertificate> {
    let geom = GeometryData::disk(radius);
    let coeff = counting_coefficients(moduli, &geom, table.bc())?;
    Ok(weyl_certificate(table, 2, coeff.a0, coeff.a1.abs()))
}

/// Refine a single dispersion root bracketed in tau; used by tests.
pub fn refine_dispersion_root(
    moduli: &ElasticModuli,
    radius: f64,
    bc: BoundaryCondition,
    n: u32,
    tau_lo: f64,
    tau_hi: f64,
) -> f64 {
    bisect_root(
        |t| elastic_disk_dispersion(moduli, radius, bc, n, t).unwrap(),
        tau_lo,
        tau_hi,
        1e-13,
    )
}
