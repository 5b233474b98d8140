//! Global assembly of the plane-strain eigenproblem: symmetric sparse
//! stiffness and mass in upper-triangular CSR, with Dirichlet displacement
//! unknowns eliminated at assembly time.

use super::element::{p1_element, p2_element};
use super::mesh::{ElementOrder, Mesh};
use crate::error::{Error, Result};
use crate::moduli::ElasticModuli;
use crate::spectrum::BoundaryCondition;
use std::collections::BTreeMap;

/// Upper-triangular symmetric sparse matrix (i <= j entries stored).
#[derive(Debug, Clone)]
pub struct SparseSym {
    pub dim: usize,
    /// (row, col (>= row)) -> value, deterministic ordering.
    entries: BTreeMap<(usize, usize), f64>,
}

impl SparseSym {
    pub fn new(dim: usize) -> Self {
        SparseSym {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let key = (i.min(j), i.max(j));
        // Off-diagonal contributions arrive twice (once per orientation) in
        // a symmetric element loop; keep only the canonical one.
        *self.entries.entry(key).or_insert(0.0) += v;
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for (&(i, j), &v) in &self.entries {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Dense column-major expansion (the eigensolver path).
    pub fn to_dense_col_major(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for (&(i, j), &v) in &self.entries {
            a[j * n + i] = v;
            a[i * n + j] = v;
        }
        a
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }
}

/// Assembled generalized eigenproblem K u = tau M u over the free
/// displacement unknowns.
#[derive(Debug, Clone)]
pub struct DiscreteEigenproblem {
    pub stiffness: SparseSym,
    pub mass: SparseSym,
    /// Global dof id (2 * node + component) of each reduced index.
    pub dof_map: Vec<usize>,
    /// Eliminated global dof ids (Dirichlet only).
    pub constrained: Vec<usize>,
    pub bc: BoundaryCondition,
}

/// Assemble the energy and mass forms.
///
/// Stiffness entries are int [2 mu Def(phi_i):Def(phi_j) + lambda div
/// phi_i div phi_j]; the traction-free condition is natural and needs no
/// boundary term, the clamped condition eliminates boundary rows/columns.
pub fn assemble(
    moduli: &ElasticModuli,
    mesh: &Mesh,
    bc: BoundaryCondition,
) -> Result<DiscreteEigenproblem> {
    mesh.validate()?;
    let n_nodes = mesh.nodes.len();
    let constrained_nodes: Vec<usize> = match bc {
        BoundaryCondition::Dirichlet => mesh.boundary_nodes(),
        BoundaryCondition::Neumann => Vec::new(),
    };
    let mut is_constrained = vec![false; 2 * n_nodes];
    for &node in &constrained_nodes {
        is_constrained[2 * node] = true;
        is_constrained[2 * node + 1] = true;
    }
    let mut reduced = vec![usize::MAX; 2 * n_nodes];
    let mut dof_map = Vec::new();
    for g in 0..2 * n_nodes {
        if !is_constrained[g] {
            reduced[g] = dof_map.len();
            dof_map.push(g);
        }
    }
    let dim = dof_map.len();
    let mut stiffness = SparseSym::new(dim);
    let mut mass = SparseSym::new(dim);
    for (t_idx, tri) in mesh.triangles.iter().enumerate() {
        let v = [
            mesh.nodes[tri[0]],
            mesh.nodes[tri[1]],
            mesh.nodes[tri[2]],
        ];
        let area = 0.5
            * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1])
                - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::Assembly {
                triangle: t_idx,
                reason: format!("degenerate element (area {area})"),
            });
        }
        let (ke, me, element_nodes): (Vec<f64>, Vec<f64>, Vec<usize>) = match mesh.order {
            ElementOrder::Linear => {
                let (k, m) = p1_element(moduli, &v);
                (k.to_vec(), m.to_vec(), tri.to_vec())
            }
            ElementOrder::Quadratic => {
                let (k, m) = p2_element(moduli, &v);
                let mids = mesh.tri_midside[t_idx];
                (
                    k,
                    m,
                    vec![tri[0], tri[1], tri[2], mids[0], mids[1], mids[2]],
                )
            }
        };
        let n_en = element_nodes.len();
        for (a, &na) in element_nodes.iter().enumerate() {
            for ca in 0..2 {
                let gi = 2 * na + ca;
                if is_constrained[gi] {
                    continue;
                }
                let i = reduced[gi];
                for (b, &nb) in element_nodes.iter().enumerate() {
                    for cb in 0..2 {
                        let gj = 2 * nb + cb;
                        if is_constrained[gj] {
                            continue;
                        }
                        let j = reduced[gj];
                        if i > j {
                            continue; // upper triangle only
                        }
                        let ea = 2 * a + ca;
                        let eb = 2 * b + cb;
                        let kv = ke[ea * 2 * n_en + eb];
                        let mv = me[ea * 2 * n_en + eb];
                        if kv != 0.0 {
                            stiffness.add(i, j, kv);
                        }
                        if mv != 0.0 {
                            mass.add(i, j, mv);
                        }
                    }
                }
            }
        }
    }
    Ok(DiscreteEigenproblem {
        stiffness,
        mass,
        dof_map,
        constrained: (0..2 * n_nodes).filter(|&g| is_constrained[g]).collect(),
        bc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::{generate_disk_mesh, generate_square_mesh};
    use approx::assert_abs_diff_eq;

    #[test]
    fn neumann_stiffness_annihilates_rigid_motions() {
        let m = ElasticModuli::new(1.0, 0.5).unwrap();
        let mesh = generate_disk_mesh(1.0, 0.3, ElementOrder::Quadratic).unwrap();
        let prob = assemble(&m, &mesh, BoundaryCondition::Neumann).unwrap();
        let dim = prob.dof_map.len();
        // translation (1, 0)
        let mut u = vec![0.0; dim];
        for (r, &g) in prob.dof_map.iter().enumerate() {
            if g % 2 == 0 {
                u[r] = 1.0;
            }
        }
        let ku = prob.stiffness.matvec(&u);
        let norm = ku.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-12, "K u_trans = {norm}");
        // rotation (-y, x)
        let mut rot = vec![0.0; dim];
        for (r, &g) in prob.dof_map.iter().enumerate() {
            let node = g / 2;
            let p = mesh.nodes[node];
            rot[r] = if g % 2 == 0 { -p[1] } else { p[0] };
        }
        let krot = prob.stiffness.matvec(&rot);
        let norm_r = krot.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm_r < 1e-11, "K u_rot = {norm_r}");
    }

    #[test]
    fn dirichlet_eliminates_boundary_dofs() {
        let m = ElasticModuli::new(1.0, 0.0).unwrap();
        let mesh = generate_square_mesh(1.0, 0.25, ElementOrder::Linear).unwrap();
        let prob = assemble(&m, &mesh, BoundaryCondition::Dirichlet).unwrap();
        let boundary = mesh.boundary_nodes();
        assert_eq!(prob.constrained.len(), 2 * boundary.len());
        assert_eq!(
            prob.dof_map.len(),
            2 * mesh.nodes.len() - prob.constrained.len()
        );
    }

    #[test]
    fn mass_row_sums_reproduce_area() {
        // sum_ij M_ij over x-components = area (integral of 1 * 1).
        let m = ElasticModuli::new(1.0, 0.0).unwrap();
        let mesh = generate_square_mesh(2.0, 0.5, ElementOrder::Quadratic).unwrap();
        let prob = assemble(&m, &mesh, BoundaryCondition::Neumann).unwrap();
        let dim = prob.dof_map.len();
        let ones_x: Vec<f64> = prob
            .dof_map
            .iter()
            .map(|&g| if g % 2 == 0 { 1.0 } else { 0.0 })
            .collect();
        let mu = prob.mass.matvec(&ones_x);
        let total: f64 = (0..dim).map(|i| ones_x[i] * mu[i]).sum();
        assert_abs_diff_eq!(total, 4.0, epsilon = 1e-10);
    }
}
