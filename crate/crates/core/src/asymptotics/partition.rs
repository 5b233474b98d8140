//! Partition function Z(t) = sum multiplicity * exp(-tau t) over a certified
//! table, with a rigorous truncation-tail envelope.

use crate::error::{Error, Result};
use crate::special::upper_gamma_half;
use crate::spectrum::SpectrumTable;

/// Z(t) samples on a t-grid together with per-point upper bounds on the
/// truncated tail sum_{tau > max_reliable} e^{-tau t}.
#[derive(Debug, Clone)]
pub struct HeatTraceSeries {
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    pub tail_bound: Vec<f64>,
    pub n_dim: u32,
    /// Indices where tail_bound <= 10% of the value; points outside are kept
    /// but flagged unusable (truncation warning encoded in the output).
    pub usable: Vec<bool>,
}

impl HeatTraceSeries {
    pub fn usable_points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.t
            .iter()
            .zip(&self.z)
            .zip(&self.tail_bound)
            .zip(&self.usable)
            .filter(|(_, u)| **u)
            .map(|(((t, z), tb), _)| (*t, *z, *tb))
    }
}

/// Weyl envelope constant: N(Lambda) <= C Lambda^{n/2}, calibrated from the
/// top half of the table itself with a 1.2x safety factor.
fn envelope_constant(table: &SpectrumTable, n_dim: u32) -> f64 {
    let half = n_dim as f64 / 2.0;
    let mut c: f64 = 0.0;
    let mut count = 0u64;
    let total = table.total_multiplicity();
    for e in table.entries() {
        count += e.multiplicity as u64;
        if count * 2 >= total && e.eigenvalue > 0.0 {
            c = c.max(count as f64 / e.eigenvalue.powf(half));
        }
    }
    if c == 0.0 {
        // degenerate tiny table: fall back to the edge ratio
        let lam = table.max_reliable().max(1e-300);
        c = total as f64 / lam.powf(half);
    }
    1.2 * c
}

/// Upper bound for sum_{tau > Lambda0} e^{-tau t} given N(Lambda) <= C
/// Lambda^{n/2}: integration by parts of the Stieltjes integral yields
/// C t^{-n/2} Gamma(n/2 + 1, t Lambda0).
fn tail_bound(c: f64, n_dim: u32, lambda0: f64, t: f64) -> f64 {
    let half_n_plus2 = n_dim + 2; // twice (n/2 + 1)
    let g = upper_gamma_half(half_n_plus2, t * lambda0).unwrap_or(f64::INFINITY);
    c * t.powf(-(n_dim as f64) / 2.0) * g
}

/// Evaluate Z on the grid. Summation runs from the largest eigenvalue down
/// so the tiny terms accumulate first.
pub fn partition_function(
    table: &SpectrumTable,
    t_grid: &[f64],
    n_dim: u32,
) -> Result<HeatTraceSeries> {
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Config("t grid must be strictly positive".into()));
    }
    let c = envelope_constant(table, n_dim);
    let entries = table.entries();
    let lambda0 = table.max_reliable();
    let mut z = Vec::with_capacity(t_grid.len());
    let mut tails = Vec::with_capacity(t_grid.len());
    let mut usable = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut sum = 0.0;
        for e in entries.iter().rev() {
            sum += e.multiplicity as f64 * (-e.eigenvalue * t).exp();
        }
        let tb = tail_bound(c, n_dim, lambda0, t);
        usable.push(tb <= 0.1 * sum.max(f64::MIN_POSITIVE));
        z.push(sum);
        tails.push(tb);
    }
    Ok(HeatTraceSeries {
        t: t_grid.to_vec(),
        z,
        tail_bound: tails,
        n_dim,
        usable,
    })
}

/// Default experiment grid: 24 geometric points per decade on
/// [t_min, t_max], where t_min is the smallest grid point with
/// tail_bound <= 1e-3 * Z and t_max caps the relative size of the
/// first dropped correction, sqrt(t) |a1_scale| / a0_scale <= 0.35.
pub fn default_t_grid(
    table: &SpectrumTable,
    n_dim: u32,
    a0_scale: f64,
    a1_scale: f64,
) -> Result<Vec<f64>> {
    let lambda0 = table.max_reliable();
    if !(lambda0 > 0.0) {
        return Err(Error::Config("table has no certification edge".into()));
    }
    let c = envelope_constant(table, n_dim);
    // Find t_min by bisection on tail_bound(t) = 1e-3 * Z_proxy(t), with the
    // leading-term proxy Z ~ a0 t^{-n/2}.
    let target = |t: f64| tail_bound(c, n_dim, lambda0, t) - 1e-3 * a0_scale * t.powf(-(n_dim as f64) / 2.0);
    let mut lo = 1e-12;
    let mut hi = 10.0;
    if target(lo) < 0.0 {
        hi = lo;
    } else {
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if target(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo < 1.0 + 1e-6 {
                break;
            }
        }
    }
    let t_min = hi;
    let t_max = if a1_scale.abs() > 0.0 {
        (0.35 * a0_scale / a1_scale.abs()).powi(2).min(t_min * 1e4)
    } else {
        t_min * 100.0
    };
    if t_max <= t_min * 1.5 {
        return Err(Error::Fit(format!(
            "usable t-window [{t_min:.3e}, {t_max:.3e}] is empty; certify more of the spectrum or change the grid"
        )));
    }
    let per_decade = 24.0;
    let decades = (t_max / t_min).log10();
    let n_pts = (decades * per_decade).ceil() as usize + 1;
    let ratio = (t_max / t_min).powf(1.0 / (n_pts - 1) as f64);
    Ok((0..n_pts).map(|i| t_min * ratio.powi(i as i32)).collect())
}
