//! Closed-form and dispersion-relation spectra on canonical domains.

mod elastic_disk;
mod interval;
mod rootscan;
mod scalar_disk;

pub use elastic_disk::{
    certify_elastic_table, elastic_disk_dispersion, elastic_disk_spectrum, refine_dispersion_root,
};
pub use interval::scalar_interval_spectrum;
pub use rootscan::{bisect_root, scan_roots};
pub use scalar_disk::scalar_disk_spectrum;

use crate::spectrum::{BoundaryCondition, SpectrumTable};

/// Completeness certificate attached to root-scanned tables: the
/// multiplicity-weighted count at the certification edge compared against
/// Weyl predictions.
#[derive(Debug, Clone)]
pub struct WeylCertificate {
    pub lambda_edge: f64,
    pub count: u64,
    pub one_term: f64,
    pub two_term: f64,
    pub band: f64,
    pub one_term_deviation: f64,
    pub passed: bool,
}

/// Check a table count against `lead * Lambda^{n/2} + sign(bc) * second *
/// Lambda^{(n-1)/2}`.
///
/// The band is deliberately generous on the traction-free side: the true
/// boundary term there carries an extra Rayleigh-wave contribution on top of
/// the bulk one, so certification only guards against gross omissions
/// (a lost branch or angular order), not against the disputed second-term
/// coefficient itself.
pub fn weyl_certificate(
    table: &SpectrumTable,
    n_dim: u32,
    lead: f64,
    second_abs: f64,
) -> WeylCertificate {
    let lambda = table.max_reliable();
    let count = table
        .counting_function(lambda)
        .expect("edge within certification") as f64;
    let half = n_dim as f64 / 2.0;
    let one_term = lead * lambda.powf(half);
    let sign = match table.bc() {
        BoundaryCondition::Dirichlet => -1.0,
        BoundaryCondition::Neumann => 1.0,
    };
    let boundary = second_abs * lambda.powf((n_dim as f64 - 1.0) / 2.0);
    let two_term = one_term + sign * boundary;
    let (center, band) = if sign > 0.0 {
        // Traction-free: the true boundary term ranges from negative (at
        // the two-speed-degenerate point) to a positive Rayleigh surplus of
        // a few times the bulk value depending on the moduli, so the
        // certificate is a wide symmetric window around the one-term law.
        (
            one_term,
            10.0 + 2.0 * lambda.powf(1.0 / 3.0) + 3.0 * boundary,
        )
    } else {
        // Clamped: centered on the formula two-term value, with slack for
        // the counting oscillation and the contested few-percent coefficient
        // drift.
        (
            two_term,
            10.0 + 2.0 * lambda.powf(1.0 / 3.0) + 0.3 * boundary,
        )
    };
    let one_term_deviation = if one_term > 0.0 {
        (count - one_term).abs() / one_term
    } else {
        f64::INFINITY
    };
    WeylCertificate {
        lambda_edge: lambda,
        count: count as u64,
        one_term,
        two_term,
        band,
        one_term_deviation,
        passed: (count - center).abs() <= band,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{
        BoundaryCondition, ModeFamily, ModeIndex, SpectrumEntry, SpectrumSource,
    };

    #[test]
    fn thinned_table_fails_certification_with_exit_code_3() {
        // A table missing most of its eigenvalues must fail the Weyl count
        // check, and the resulting error must carry the suspect interval
        // and map to the certification exit code.
        let entries: Vec<SpectrumEntry> = (1..=40)
            .map(|k| SpectrumEntry {
                eigenvalue: 100.0 * k as f64,
                multiplicity: 1,
                mode: ModeIndex {
                    family: ModeFamily::Scalar,
                    angular_order: 0,
                    radial_index: k,
                },
            })
            .collect();
        let table = SpectrumTable::new(
            entries,
            BoundaryCondition::Dirichlet,
            SpectrumSource::Dispersion,
            4000.0,
        )
        .unwrap();
        // Unit-disk scalar Weyl data: lead = 1/4, second = 1/2.
        let cert = weyl_certificate(&table, 2, 0.25, 0.5);
        assert!(!cert.passed, "a 40-mode table cannot pass at Lambda = 4000");
        let err = super::scalar_disk::certification_error(&cert);
        assert_eq!(err.exit_code(), 3);
        match err {
            crate::error::Error::IncompleteSpectrum { suspect_hi, .. } => {
                assert_eq!(suspect_hi, 4000.0)
            }
            other => panic!("wrong error variant: {other}"),
        }
    }
}
