//! The verification engine: partition and counting functions, theoretical
//! coefficient evaluators, empirical fits, the forward Tauberian bridge, and
//! comparison reports.

mod coefficients;
mod fit;
mod geometry;
mod partition;
mod report;
mod tauberian;

pub use coefficients::{
    counting_coefficients, heat_coefficients, mckean_singer_reference, CoefficientKind,
    CoefficientSet,
};
pub use fit::{fit_counting_coefficients, fit_heat_coefficients, fit_heat_coefficients_for, CountingFit};
pub use geometry::GeometryData;
pub use partition::{default_t_grid, partition_function, HeatTraceSeries};
pub use report::{comparison_report, CoefficientComparison, ComparisonReport, Verdict};
pub use tauberian::tauberian_forward;
