//! Theory-vs-fit comparison with 3-sigma verdicts.
//!
//! The report quantifies discrepancies; it deliberately never asserts which
//! side of the contested second-term literature is correct.

use super::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::output::Json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientComparison {
    pub name: &'static str,
    pub theoretical: f64,
    pub fitted: f64,
    pub abs_discrepancy: f64,
    pub rel_discrepancy: f64,
    pub uncertainty: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub rows: Vec<CoefficientComparison>,
}

fn judge(delta: f64, unc: Option<f64>) -> Verdict {
    match unc {
        None => Verdict::Inconclusive,
        Some(s) if !s.is_finite() => Verdict::Inconclusive,
        Some(s) => {
            if delta <= 3.0 * s {
                Verdict::Consistent
            } else {
                Verdict::Inconsistent
            }
        }
    }
}

/// Compare matching coefficient sets. `num_terms` restricts how many
/// coefficients participate (counting kinds carry only two).
pub fn comparison_report(
    theoretical: &CoefficientSet,
    fitted: &CoefficientSet,
    num_terms: usize,
) -> Result<ComparisonReport> {
    if theoretical.bc != fitted.bc {
        return Err(Error::Config(
            "comparison requires matching boundary conditions".into(),
        ));
    }
    let names = ["a0", "a1", "a2"];
    let th = [theoretical.a0, theoretical.a1, theoretical.a2];
    let ft = [fitted.a0, fitted.a1, fitted.a2];
    let mut rows = Vec::new();
    for k in 0..num_terms.min(3) {
        let delta = (th[k] - ft[k]).abs();
        let unc = fitted.uncertainty.map(|u| u[k]);
        let rel = if th[k] != 0.0 {
            delta / th[k].abs()
        } else {
            f64::INFINITY
        };
        rows.push(CoefficientComparison {
            name: names[k],
            theoretical: th[k],
            fitted: ft[k],
            abs_discrepancy: delta,
            rel_discrepancy: rel,
            uncertainty: unc,
            verdict: judge(delta, unc),
        });
    }
    Ok(ComparisonReport { rows })
}

impl ComparisonReport {
    pub fn to_json(&self) -> Json {
        let mut arr = Vec::new();
        for r in &self.rows {
            let mut o = Json::object();
            o.push("coefficient", Json::Str(r.name.to_string()));
            o.push("theoretical", Json::Float(r.theoretical));
            o.push("fitted", Json::Float(r.fitted));
            o.push("abs_discrepancy", Json::Float(r.abs_discrepancy));
            o.push("rel_discrepancy", Json::Float(r.rel_discrepancy));
            o.push(
                "uncertainty",
                match r.uncertainty {
                    Some(u) => Json::Float(u),
                    None => Json::Null,
                },
            );
            o.push("verdict", Json::Str(r.verdict.label().to_string()));
            arr.push(o);
        }
        Json::Array(arr)
    }
}
