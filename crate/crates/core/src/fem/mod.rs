//! Plane-strain linear-elasticity eigensolver on triangulated planar
//! domains: the independent numerical oracle for the dispersion spectra.

mod assemble;
mod driver;
mod eigen;
mod element;
mod mesh;

pub use assemble::{assemble, DiscreteEigenproblem, SparseSym};
pub use driver::{
    convergence_study, elastic_fem_spectrum, ConvergenceStudy, FemDomain, FemSpectrum,
};
pub use eigen::{solve_eigen, solve_eigen_raw, EigenSolution, MAX_DENSE_DIM};
pub use element::{p1_element, p2_element};
pub use mesh::{add_midside_nodes, generate_disk_mesh, generate_square_mesh, ElementOrder, Mesh};
