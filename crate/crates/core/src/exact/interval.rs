//! Scalar Laplacian spectrum on an interval (0, L): separation of variables.

use crate::error::{Error, Result};
use crate::spectrum::{
    BoundaryCondition, ModeFamily, ModeIndex, SpectrumEntry, SpectrumSource, SpectrumTable,
};

const MAX_COUNT: u64 = 10_000_000;

/// Dirichlet: (k pi / L)^2 for k = 1..count; Neumann: k = 0..count-1.
/// All multiplicities are 1; `max_reliable` is the last entry.
pub fn scalar_interval_spectrum(
    length: f64,
    bc: BoundaryCondition,
    count: u64,
) -> Result<SpectrumTable> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::Config(format!(
            "interval length must be positive, got {length}"
        )));
    }
    if count == 0 || count > MAX_COUNT {
        return Err(Error::Config(format!(
            "eigenvalue count must be in 1..={MAX_COUNT}, got {count}"
        )));
    }
    let k0 = match bc {
        BoundaryCondition::Dirichlet => 1u64,
        BoundaryCondition::Neumann => 0u64,
    };
    let mut entries = Vec::with_capacity(count as usize);
    let mut last = 0.0;
    for i in 0..count {
        let k = k0 + i;
        let root = k as f64 * std::f64::consts::PI / length;
        let ev = root * root;
        last = ev;
        entries.push(SpectrumEntry {
            eigenvalue: ev,
            multiplicity: 1,
            mode: ModeIndex {
                family: ModeFamily::Scalar,
                angular_order: 0,
                radial_index: k as u32,
            },
        });
    }
    SpectrumTable::new(entries, bc, SpectrumSource::Exact, last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dirichlet_on_pi() {
        let t =
            scalar_interval_spectrum(std::f64::consts::PI, BoundaryCondition::Dirichlet, 3)
                .unwrap();
        let evs = t.flattened();
        assert_abs_diff_eq!(evs[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(evs[1], 4.0, epsilon = 1e-13);
        assert_abs_diff_eq!(evs[2], 9.0, epsilon = 1e-13);
    }

    #[test]
    fn neumann_starts_at_zero() {
        let t =
            scalar_interval_spectrum(std::f64::consts::PI, BoundaryCondition::Neumann, 3).unwrap();
        let evs = t.flattened();
        assert_eq!(evs[0], 0.0);
        assert_abs_diff_eq!(evs[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(evs[2], 4.0, epsilon = 1e-13);
    }

    #[test]
    fn long_interval() {
        let t = scalar_interval_spectrum(
            2.0 * std::f64::consts::PI,
            BoundaryCondition::Dirichlet,
            1,
        )
        .unwrap();
        assert_abs_diff_eq!(t.flattened()[0], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn exact_square_count() {
        // N(Lambda) = #{k^2 <= Lambda} = floor(sqrt(Lambda)) for L = pi.
        let t = scalar_interval_spectrum(std::f64::consts::PI, BoundaryCondition::Dirichlet, 150)
            .unwrap();
        assert_eq!(t.counting_function(10_000.0).unwrap(), 100);
        assert_eq!(t.counting_function(10_000.5).unwrap(), 100);
        assert_eq!(t.counting_function(9_999.5).unwrap(), 99);
    }
}
