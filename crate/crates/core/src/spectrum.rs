//! Eigenvalue tables with multiplicity, provenance, and certification
//! metadata.

use crate::error::{Error, Result};
use crate::output::fmt_float;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(BoundaryCondition::Dirichlet),
            "neumann" => Ok(BoundaryCondition::Neumann),
            _ => Err(Error::Config(format!(
                "unknown boundary condition `{s}` (expected dirichlet|neumann)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Exact,
    Dispersion,
    Fem,
}

impl SpectrumSource {
    pub fn label(&self) -> &'static str {
        match self {
            SpectrumSource::Exact => "exact",
            SpectrumSource::Dispersion => "dispersion",
            SpectrumSource::Fem => "fem",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeFamily {
    Scalar,
    Elastic,
}

/// Identifies one separable mode: which dispersion family it came from,
/// its angular order, and the index of the root within that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex {
    pub family: ModeFamily,
    pub angular_order: u32,
    /// 1-based root count within the angular order; 0 marks rigid-body modes.
    pub radial_index: u32,
}

/// One table row: an eigenvalue with its multiplicity and mode provenance.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: u32,
    pub mode: ModeIndex,
}

/// Sorted eigenvalue table, certified complete up to `max_reliable`.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    entries: Vec<SpectrumEntry>,
    bc: BoundaryCondition,
    source: SpectrumSource,
    max_reliable: f64,
}

impl SpectrumTable {
    pub fn new(
        mut entries: Vec<SpectrumEntry>,
        bc: BoundaryCondition,
        source: SpectrumSource,
        max_reliable: f64,
    ) -> Result<Self> {
        entries.sort_by(|a, b| {
            a.eigenvalue
                .partial_cmp(&b.eigenvalue)
                .unwrap()
                .then(a.mode.angular_order.cmp(&b.mode.angular_order))
                .then(a.mode.radial_index.cmp(&b.mode.radial_index))
        });
        for e in &entries {
            if !e.eigenvalue.is_finite() || e.eigenvalue < 0.0 {
                return Err(Error::Numerics(format!(
                    "eigenvalue {} is not a nonnegative finite number",
                    e.eigenvalue
                )));
            }
            if e.multiplicity == 0 {
                return Err(Error::Numerics("zero multiplicity entry".into()));
            }
        }
        if bc == BoundaryCondition::Dirichlet {
            if let Some(first) = entries.first() {
                if first.eigenvalue <= 0.0 {
                    return Err(Error::Numerics(
                        "Dirichlet spectrum must be strictly positive".into(),
                    ));
                }
            }
        }
        Ok(Self {
            entries,
            bc,
            source,
            max_reliable,
        })
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    pub fn max_reliable(&self) -> f64 {
        self.max_reliable
    }

    pub fn set_max_reliable(&mut self, v: f64) {
        self.max_reliable = v;
    }

    /// Number of table rows (not multiplicity-weighted).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplicity-weighted total count.
    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity as u64).sum()
    }

    /// Eigenvalues repeated by multiplicity, ascending.
    pub fn flattened(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.total_multiplicity() as usize);
        for e in &self.entries {
            for _ in 0..e.multiplicity {
                v.push(e.eigenvalue);
            }
        }
        v
    }

    /// Multiplicity-weighted counting function N(Lambda) = #{tau_k <= Lambda},
    /// right-continuous.
    pub fn counting_function(&self, lambda: f64) -> Result<u64> {
        if lambda > self.max_reliable {
            return Err(Error::Range(format!(
                "counting function queried at {lambda} beyond certification edge {}",
                self.max_reliable
            )));
        }
        Ok(self
            .entries
            .iter()
            .take_while(|e| e.eigenvalue <= lambda)
            .map(|e| e.multiplicity as u64)
            .sum())
    }

    /// CSV per the documented schema:
    /// `index,eigenvalue,multiplicity,angular_order,radial_index,bc,source`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("index,eigenvalue,multiplicity,angular_order,radial_index,bc,source\n");
        for (i, e) in self.entries.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                i,
                fmt_float(e.eigenvalue),
                e.multiplicity,
                e.mode.angular_order,
                e.mode.radial_index,
                self.bc.label(),
                self.source.label()
            ));
        }
        out
    }

    /// JSON summary `{bc, source, count, max_reliable, eigenvalues:[...]}`.
    /// `count` is the multiplicity-weighted total; the list repeats
    /// eigenvalues by multiplicity.
    pub fn to_json_summary(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"bc\": \"{}\",\n", self.bc.label()));
        out.push_str(&format!("  \"source\": \"{}\",\n", self.source.label()));
        out.push_str(&format!("  \"count\": {},\n", self.total_multiplicity()));
        out.push_str(&format!(
            "  \"max_reliable\": {},\n",
            fmt_float(self.max_reliable)
        ));
        out.push_str("  \"eigenvalues\": [");
        let flat = self.flattened();
        for (i, v) in flat.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&fmt_float(*v));
        }
        out.push_str("]\n}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(ev: f64, mult: u32) -> SpectrumEntry {
        SpectrumEntry {
            eigenvalue: ev,
            multiplicity: mult,
            mode: ModeIndex {
                family: ModeFamily::Scalar,
                angular_order: 0,
                radial_index: 1,
            },
        }
    }

    #[test]
    fn counting_is_right_continuous() {
        let t = SpectrumTable::new(
            vec![entry(1.0, 1), entry(1.0, 1), entry(2.0, 1)],
            BoundaryCondition::Dirichlet,
            SpectrumSource::Exact,
            10.0,
        )
        .unwrap();
        assert_eq!(t.counting_function(1.5).unwrap(), 2);
        // boundary case: count includes tau = Lambda
        assert_eq!(t.counting_function(1.0).unwrap(), 2);
        assert_eq!(t.counting_function(0.5).unwrap(), 0);
        assert!(t.counting_function(11.0).is_err());
    }

    #[test]
    fn dirichlet_rejects_zero_mode() {
        let r = SpectrumTable::new(
            vec![entry(0.0, 1)],
            BoundaryCondition::Dirichlet,
            SpectrumSource::Exact,
            1.0,
        );
        assert!(r.is_err());
        let ok = SpectrumTable::new(
            vec![entry(0.0, 3)],
            BoundaryCondition::Neumann,
            SpectrumSource::Exact,
            1.0,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn csv_schema() {
        let t = SpectrumTable::new(
            vec![entry(1.0, 2)],
            BoundaryCondition::Neumann,
            SpectrumSource::Dispersion,
            4.0,
        )
        .unwrap();
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "index,eigenvalue,multiplicity,angular_order,radial_index,bc,source"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("0,1.000000000000e+00,2,0,1,neumann,dispersion"));
    }
}
