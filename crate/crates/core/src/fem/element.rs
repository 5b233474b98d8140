//! Element stiffness and mass matrices for plane-strain elasticity on
//! straight-edged P1 and P2 triangles.
//!
//! Energy form: int [ 2 mu Def(u):Def(v) + lambda div u div v ]. In Voigt
//! strain coordinates (e_xx, e_yy, g_xy) the constitutive matrix is
//! [[2mu+lambda, lambda, 0], [lambda, 2mu+lambda, 0], [0, 0, mu]].
//! DOF ordering is interleaved: (n0x, n0y, n1x, n1y, ...).

use crate::moduli::ElasticModuli;

/// Dunavant degree-4 rule, 6 points; weights sum to 1 (multiply by area).
const QUAD6: [([f64; 3], f64); 6] = [
    (
        [0.108103018168070, 0.445948490915965, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.108103018168070, 0.445948490915965],
        0.223381589678011,
    ),
    (
        [0.445948490915965, 0.445948490915965, 0.108103018168070],
        0.223381589678011,
    ),
    (
        [0.816847572980459, 0.091576213509771, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.816847572980459, 0.091576213509771],
        0.109951743655322,
    ),
    (
        [0.091576213509771, 0.091576213509771, 0.816847572980459],
        0.109951743655322,
    ),
];

/// Geometry shared by both element orders: barycentric gradients and area.
pub struct TriGeometry {
    pub area: f64,
    /// grad L_i in physical coordinates, constant over the triangle.
    pub grad_l: [[f64; 2]; 3],
}

pub fn tri_geometry(v: &[[f64; 2]; 3]) -> TriGeometry {
    let [a, b, c] = *v;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let area = 0.5 * det;
    let inv = 1.0 / det;
    TriGeometry {
        area,
        grad_l: [
            [(b[1] - c[1]) * inv, (c[0] - b[0]) * inv],
            [(c[1] - a[1]) * inv, (a[0] - c[0]) * inv],
            [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv],
        ],
    }
}

fn dmatrix(m: &ElasticModuli) -> [[f64; 3]; 3] {
    let (mu, la) = (m.mu(), m.lambda());
    [
        [2.0 * mu + la, la, 0.0],
        [la, 2.0 * mu + la, 0.0],
        [0.0, 0.0, mu],
    ]
}

/// Accumulate B^T D B * w into k for one quadrature point, given per-node
/// shape gradients. n_nodes is 3 (P1) or 6 (P2); k is (2 n)^2 row-major.
fn accumulate_stiffness(k: &mut [f64], grads: &[[f64; 2]], d: &[[f64; 3]; 3], w: f64) {
    let n = grads.len();
    // B columns for dof (node a, comp 0): (dNa/dx, 0, dNa/dy);
    // comp 1: (0, dNa/dy, dNa/dx).
    let bcol = |dof: usize| -> [f64; 3] {
        let (a, c) = (dof / 2, dof % 2);
        if c == 0 {
            [grads[a][0], 0.0, grads[a][1]]
        } else {
            [0.0, grads[a][1], grads[a][0]]
        }
    };
    for i in 0..2 * n {
        let bi = bcol(i);
        let dbi = [
            d[0][0] * bi[0] + d[0][1] * bi[1] + d[0][2] * bi[2],
            d[1][0] * bi[0] + d[1][1] * bi[1] + d[1][2] * bi[2],
            d[2][0] * bi[0] + d[2][1] * bi[1] + d[2][2] * bi[2],
        ];
        for j in 0..2 * n {
            let bj = bcol(j);
            k[i * 2 * n + j] += w * (dbi[0] * bj[0] + dbi[1] * bj[1] + dbi[2] * bj[2]);
        }
    }
}

/// P1 element stiffness (6x6, row-major) and mass (6x6).
pub fn p1_element(m: &ElasticModuli, v: &[[f64; 2]; 3]) -> ([f64; 36], [f64; 36]) {
    let geo = tri_geometry(v);
    let d = dmatrix(m);
    let mut k = [0.0; 36];
    accumulate_stiffness(&mut k, &geo.grad_l, &d, geo.area);
    // Mass: int N_a N_b = area/12 (1 + delta_ab), per component.
    let mut mass = [0.0; 36];
    for a in 0..3 {
        for b in 0..3 {
            let val = geo.area / 12.0 * if a == b { 2.0 } else { 1.0 };
            for c in 0..2 {
                mass[(2 * a + c) * 6 + (2 * b + c)] = val;
            }
        }
    }
    (k, mass)
}

/// P2 shape functions in barycentric coordinates: vertices then midside
/// nodes in edge order (0-1, 1-2, 2-0).
fn p2_values(l: [f64; 3]) -> [f64; 6] {
    [
        l[0] * (2.0 * l[0] - 1.0),
        l[1] * (2.0 * l[1] - 1.0),
        l[2] * (2.0 * l[2] - 1.0),
        4.0 * l[0] * l[1],
        4.0 * l[1] * l[2],
        4.0 * l[2] * l[0],
    ]
}

fn p2_gradients(l: [f64; 3], grad_l: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let gl = grad_l;
    let mut g = [[0.0; 2]; 6];
    for d in 0..2 {
        g[0][d] = (4.0 * l[0] - 1.0) * gl[0][d];
        g[1][d] = (4.0 * l[1] - 1.0) * gl[1][d];
        g[2][d] = (4.0 * l[2] - 1.0) * gl[2][d];
        g[3][d] = 4.0 * (l[1] * gl[0][d] + l[0] * gl[1][d]);
        g[4][d] = 4.0 * (l[2] * gl[1][d] + l[1] * gl[2][d]);
        g[5][d] = 4.0 * (l[0] * gl[2][d] + l[2] * gl[0][d]);
    }
    g
}

/// P2 element stiffness and mass (12x12 row-major).
pub fn p2_element(m: &ElasticModuli, v: &[[f64; 2]; 3]) -> (Vec<f64>, Vec<f64>) {
    let geo = tri_geometry(v);
    let d = dmatrix(m);
    let mut k = vec![0.0; 144];
    let mut mass = vec![0.0; 144];
    for (l, w) in QUAD6 {
        let grads = p2_gradients(l, &geo.grad_l);
        accumulate_stiffness(&mut k, &grads, &d, w * geo.area);
        let vals = p2_values(l);
        for a in 0..6 {
            for b in 0..6 {
                let vm = w * geo.area * vals[a] * vals[b];
                for c in 0..2 {
                    mass[(2 * a + c) * 12 + (2 * b + c)] += vm;
                }
            }
        }
    }
    (k, mass)
}
