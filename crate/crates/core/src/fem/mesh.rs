//! Planar triangulations for the eigensolver: graded ring meshes on disks,
//! crossed-diagonal grids on squares, midside nodes for quadratic elements,
//! and the plain-text mesh file format.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Linear,
    Quadratic,
}

impl ElementOrder {
    pub fn as_int(&self) -> u32 {
        match self {
            ElementOrder::Linear => 1,
            ElementOrder::Quadratic => 2,
        }
    }

    pub fn from_int(v: u32) -> Result<Self> {
        match v {
            1 => Ok(ElementOrder::Linear),
            2 => Ok(ElementOrder::Quadratic),
            _ => Err(Error::Config(format!("element order must be 1 or 2, got {v}"))),
        }
    }
}

/// Triangulation with boundary markers. Vertex nodes come first; for
/// quadratic meshes the midside nodes follow, generated deterministically
/// edge by edge in first-encounter order.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    /// Vertex index triples, positively oriented.
    pub triangles: Vec<[usize; 3]>,
    /// Vertex pairs with marker; cover exactly the topological boundary.
    pub boundary_edges: Vec<(usize, usize, i32)>,
    pub order: ElementOrder,
    /// Per-triangle midside node ids for edges (0-1, 1-2, 2-0); empty for
    /// linear meshes.
    pub tri_midside: Vec<[usize; 3]>,
    pub n_vertices: usize,
}

fn tri_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Total straight-edge area.
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| tri_area(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]))
            .sum()
    }

    /// Longest edge over all triangles.
    pub fn max_edge(&self) -> f64 {
        let mut max = 0.0f64;
        for t in &self.triangles {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let (a, b) = (self.nodes[i], self.nodes[j]);
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                max = max.max(d);
            }
        }
        max
    }

    /// Nodes lying on the boundary: endpoints of boundary edges plus, for
    /// quadratic meshes, their midside nodes.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut flags = vec![false; self.nodes.len()];
        let bset: std::collections::BTreeSet<(usize, usize)> = self
            .boundary_edges
            .iter()
            .map(|&(i, j, _)| (i.min(j), i.max(j)))
            .collect();
        for &(i, j, _) in &self.boundary_edges {
            flags[i] = true;
            flags[j] = true;
        }
        if self.order == ElementOrder::Quadratic {
            for (t, mids) in self.triangles.iter().zip(&self.tri_midside) {
                let edges = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
                for (e, &m) in edges.iter().zip(mids.iter()) {
                    if bset.contains(&(e.0.min(e.1), e.0.max(e.1))) {
                        flags[m] = true;
                    }
                }
            }
        }
        flags
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| f.then_some(i))
            .collect()
    }

    /// Structural validation: orientation, degeneracy, boundary closure,
    /// midside consistency.
    pub fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() {
            return Err(Error::Mesh("mesh has no triangles".into()));
        }
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let bbox_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        for (k, t) in self.triangles.iter().enumerate() {
            let a = tri_area(self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]);
            if a <= 1e-14 * bbox_area {
                return Err(Error::Mesh(format!(
                    "triangle {k} is degenerate or negatively oriented (area {a:e})"
                )));
            }
        }
        // Every once-used edge must be a boundary edge and vice versa.
        let mut edge_use: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for t in &self.triangles {
            for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edge_use.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        let boundary_set: std::collections::BTreeSet<(usize, usize)> = self
            .boundary_edges
            .iter()
            .map(|&(i, j, _)| (i.min(j), i.max(j)))
            .collect();
        for (edge, uses) in &edge_use {
            match uses {
                1 => {
                    if !boundary_set.contains(edge) {
                        return Err(Error::Mesh(format!(
                            "edge {edge:?} is topological boundary but unmarked"
                        )));
                    }
                }
                2 => {
                    if boundary_set.contains(edge) {
                        return Err(Error::Mesh(format!(
                            "interior edge {edge:?} marked as boundary"
                        )));
                    }
                }
                _ => {
                    return Err(Error::Mesh(format!(
                        "edge {edge:?} used by {uses} triangles"
                    )))
                }
            }
        }
        if boundary_set.len() != self.boundary_edges.len() {
            return Err(Error::Mesh("duplicate boundary edges".into()));
        }
        // Boundary edges must close up: every boundary vertex has even degree.
        let mut degree: BTreeMap<usize, u32> = BTreeMap::new();
        for &(i, j, _) in &self.boundary_edges {
            *degree.entry(i).or_insert(0) += 1;
            *degree.entry(j).or_insert(0) += 1;
        }
        if degree.values().any(|&d| d != 2) {
            return Err(Error::Mesh(
                "boundary edges do not form closed loops".into(),
            ));
        }
        if self.order == ElementOrder::Quadratic {
            if self.tri_midside.len() != self.triangles.len() {
                return Err(Error::Mesh("missing midside nodes".into()));
            }
            for (t, mids) in self.triangles.iter().zip(&self.tri_midside) {
                let edges = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
                for (e, &m) in edges.iter().zip(mids.iter()) {
                    let (a, b) = (self.nodes[e.0], self.nodes[e.1]);
                    let mid = self.nodes[m];
                    let dx = mid[0] - 0.5 * (a[0] + b[0]);
                    let dy = mid[1] - 0.5 * (a[1] + b[1]);
                    if (dx * dx + dy * dy).sqrt() > 1e-12 {
                        return Err(Error::Mesh(format!(
                            "midside node {m} off its edge midpoint"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Scale all node coordinates by kappa (affine invariance of the mesh
    /// structure).
    pub fn scaled(&self, kappa: f64) -> Mesh {
        let mut m = self.clone();
        for p in &mut m.nodes {
            p[0] *= kappa;
            p[1] *= kappa;
        }
        m
    }

    /// Serialize to the documented text format; vertex nodes only, midside
    /// nodes are regenerated on load.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} {} {}\n",
            self.n_vertices,
            self.triangles.len(),
            self.boundary_edges.len(),
            self.order.as_int()
        ));
        for p in &self.nodes[..self.n_vertices] {
            out.push_str(&format!(
                "{} {}\n",
                crate::output::fmt_float(p[0]),
                crate::output::fmt_float(p[1])
            ));
        }
        for t in &self.triangles {
            out.push_str(&format!("{} {} {}\n", t[0], t[1], t[2]));
        }
        for &(i, j, m) in &self.boundary_edges {
            out.push_str(&format!("{i} {j} {m}\n"));
        }
        out
    }

    /// Parse the text format and rebuild midside nodes if order = 2.
    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty mesh file".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 4 {
            return Err(Error::Config(
                "mesh header must be `nodes triangles boundary_edges order`".into(),
            ));
        }
        let parse_usize = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Config(format!("bad integer `{s}` in mesh file")))
        };
        let n: usize = parse_usize(head[0])?;
        let t: usize = parse_usize(head[1])?;
        let b: usize = parse_usize(head[2])?;
        let order = ElementOrder::from_int(parse_usize(head[3])? as u32)?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Config("mesh file truncated in node block".into()))?;
            let xs: Vec<&str> = line.split_whitespace().collect();
            if xs.len() != 2 {
                return Err(Error::Config(format!("bad node line `{line}`")));
            }
            let px: f64 = xs[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad coordinate `{}`", xs[0])))?;
            let py: f64 = xs[1]
                .parse()
                .map_err(|_| Error::Config(format!("bad coordinate `{}`", xs[1])))?;
            nodes.push([px, py]);
        }
        let mut triangles = Vec::with_capacity(t);
        for _ in 0..t {
            let line = lines
                .next()
                .ok_or_else(|| Error::Config("mesh file truncated in triangle block".into()))?;
            let xs: Vec<&str> = line.split_whitespace().collect();
            if xs.len() != 3 {
                return Err(Error::Config(format!("bad triangle line `{line}`")));
            }
            triangles.push([
                parse_usize(xs[0])?,
                parse_usize(xs[1])?,
                parse_usize(xs[2])?,
            ]);
        }
        let mut boundary_edges = Vec::with_capacity(b);
        for _ in 0..b {
            let line = lines
                .next()
                .ok_or_else(|| Error::Config("mesh file truncated in boundary block".into()))?;
            let xs: Vec<&str> = line.split_whitespace().collect();
            if xs.len() != 3 {
                return Err(Error::Config(format!("bad boundary line `{line}`")));
            }
            let marker: i32 = xs[2]
                .parse()
                .map_err(|_| Error::Config(format!("bad marker `{}`", xs[2])))?;
            boundary_edges.push((parse_usize(xs[0])?, parse_usize(xs[1])?, marker));
        }
        let mut mesh = Mesh {
            nodes,
            triangles,
            boundary_edges,
            order: ElementOrder::Linear,
            tri_midside: Vec::new(),
            n_vertices: n,
        };
        if order == ElementOrder::Quadratic {
            mesh = add_midside_nodes(mesh);
        }
        mesh.validate()?;
        Ok(mesh)
    }
}

/// Add midside nodes edge by edge in triangle order (deterministic).
pub fn add_midside_nodes(mut mesh: Mesh) -> Mesh {
    let mut edge_node: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut tri_midside = Vec::with_capacity(mesh.triangles.len());
    let triangles = mesh.triangles.clone();
    for t in &triangles {
        let mut mids = [0usize; 3];
        for (slot, (i, j)) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
            .into_iter()
            .enumerate()
        {
            let key = (i.min(j), i.max(j));
            let id = *edge_node.entry(key).or_insert_with(|| {
                let a = mesh.nodes[i];
                let b = mesh.nodes[j];
                mesh.nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
                mesh.nodes.len() - 1
            });
            mids[slot] = id;
        }
        tri_midside.push(mids);
    }
    mesh.tri_midside = tri_midside;
    mesh.order = ElementOrder::Quadratic;
    mesh
}

/// Bridge two concentric node rings with triangles, walking both rings by
/// angle. Ring nodes must be ordered by increasing angle.
fn bridge_rings(
    inner: &[usize],
    outer: &[usize],
    angles_inner: &[f64],
    angles_outer: &[f64],
    triangles: &mut Vec<[usize; 3]>,
) {
    let ni = inner.len();
    let no = outer.len();
    let mut i = 0usize; // completed steps on inner
    let mut o = 0usize; // completed steps on outer
    let two_pi = 2.0 * std::f64::consts::PI;
    // Merge by front-edge midpoints: keeps the tangential lag of the
    // diagonals near half a gap instead of a full one.
    let ang = |angles: &[f64], k: usize| -> f64 {
        angles[k % angles.len()] + (k / angles.len()) as f64 * two_pi
    };
    while i < ni || o < no {
        let mid_inner = if i < ni {
            0.5 * (ang(angles_inner, i) + ang(angles_inner, i + 1))
        } else {
            f64::INFINITY
        };
        let mid_outer = if o < no {
            0.5 * (ang(angles_outer, o) + ang(angles_outer, o + 1))
        } else {
            f64::INFINITY
        };
        if mid_outer <= mid_inner {
            // advance outer: triangle (outer_o, outer_{o+1}, inner_i)
            triangles.push([outer[o % no], outer[(o + 1) % no], inner[i % ni]]);
            o += 1;
        } else {
            // advance inner: triangle (inner_{i+1}, inner_i, outer_o)
            triangles.push([inner[(i + 1) % ni], inner[i % ni], outer[o % no]]);
            i += 1;
        }
    }
}

/// Disk mesh constants (multiples of target_h). The ladder is
/// block-structured: ring node counts halve toward the center in powers of
/// two with phases kept commensurate, so every ring-to-ring bridge is
/// either a half-staggered equal-count strip or an aligned 1:2 split. Both
/// keep the tangential lag of the diagonals at half an arc, which is what
/// bounds the longest edge by 1.5 target_h; incommensurate ring counts
/// would alias somewhere into sqrt(dr^2 + arc^2) diagonals.
const DISK_RADIAL: f64 = 1.28;
const DISK_ARC: f64 = 1.48;
/// Boundary spacing also obeys an absolute cap of 0.075 radius so the
/// straight-chord area deficit (pi/6) s^2 stays below 0.1% of the disk.
const DISK_BOUNDARY_FRACTION: f64 = 0.075;
/// Deepest count-halving level (counts below m_top / 8 stop shrinking; the
/// innermost rings are tiny and cheap anyway).
const DISK_MAX_BLOCK_DEPTH: u32 = 2;

/// Quasi-uniform disk triangulation from concentric rings in
/// count-doubling blocks. Boundary vertex nodes are snapped onto the
/// circle.
pub fn generate_disk_mesh(radius: f64, target_h: f64, order: ElementOrder) -> Result<Mesh> {
    if !(radius > 0.0) || !target_h.is_finite() {
        return Err(Error::Config(format!("bad radius {radius} or h {target_h}")));
    }
    if !(target_h > 0.0 && target_h < radius) {
        return Err(Error::Mesh(format!(
            "target_h = {target_h} cannot resolve a disk of radius {radius}"
        )));
    }
    let rings = ((radius / (DISK_RADIAL * target_h)).ceil() as usize).max(2);
    let dr = radius / rings as f64;
    // Outer ring spacing: the h-proportional target, capped by the absolute
    // area-deficit rule.
    let s_boundary = (DISK_ARC * target_h).min(DISK_BOUNDARY_FRACTION * radius);
    let depth_cap = DISK_MAX_BLOCK_DEPTH.min(31 - (rings as u32).leading_zeros());
    let align = 1usize << depth_cap;
    let m_top = ((2.0 * std::f64::consts::PI * radius / s_boundary).ceil() as usize)
        .max(6 * align)
        .next_multiple_of(align);
    // Counts per ring: halve per block toward the center, then verify every
    // bridge's worst-case chord exactly and bump the inner ring a chain
    // level where the 1.5 target_h bound would break. A bridge between
    // rings with counts (m, m') spans at most half the coarser angular gap,
    // for both the staggered equal-count strips and the aligned 1:2 splits.
    let mut counts: Vec<usize> = (1..=rings)
        .map(|i| {
            let b = (((rings as f64) / (i as f64)).log2().floor() as u32).min(depth_cap);
            (m_top >> b).max(6)
        })
        .collect();
    let edge_cap = 1.5 * target_h * 0.9999;
    let chord = |r1: f64, r2: f64, dtheta: f64| -> f64 {
        (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * dtheta.cos()).sqrt()
    };
    for i in 1..=rings {
        let r_i = i as f64 * dr;
        // In-ring arc chord.
        while 2.0 * r_i * (std::f64::consts::PI / counts[i - 1] as f64).sin() > edge_cap
            && counts[i - 1] < m_top
        {
            counts[i - 1] *= 2;
        }
        if i < rings {
            let r_next = (i + 1) as f64 * dr;
            loop {
                let m_min = counts[i - 1].min(counts[i]) as f64;
                let worst = chord(r_i, r_next, std::f64::consts::PI / m_min);
                if worst <= edge_cap || counts[i - 1] >= counts[i] {
                    break;
                }
                counts[i - 1] *= 2;
            }
        }
    }
    let mut nodes = vec![[0.0, 0.0]];
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    let mut ring_angles: Vec<Vec<f64>> = vec![vec![0.0]];
    let mut phase = 0.0f64;
    let mut prev_count = 0usize;
    for i in 1..=rings {
        let r_i = i as f64 * dr;
        let count = counts[i - 1];
        if i > 1 && count == prev_count {
            // Equal-count strip: stagger by half a spacing.
            phase += std::f64::consts::PI / count as f64;
        }
        // Count transitions keep the phase: the doubled ring aligns node
        // 2k with the inner node k and centers node 2k+1 on the gaps.
        let mut ids = Vec::with_capacity(count);
        let mut angs = Vec::with_capacity(count);
        for k in 0..count {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64 + phase;
            // Boundary ring nodes are exact up to rounding of cos/sin.
            nodes.push([r_i * theta.cos(), r_i * theta.sin()]);
            ids.push(nodes.len() - 1);
            angs.push(theta);
        }
        ring_ids.push(ids);
        ring_angles.push(angs);
        prev_count = count;
    }
    let mut triangles = Vec::new();
    // Center fan to ring 1.
    let first = &ring_ids[1];
    for k in 0..first.len() {
        triangles.push([0, first[k], first[(k + 1) % first.len()]]);
    }
    for i in 1..rings {
        bridge_rings(
            &ring_ids[i],
            &ring_ids[i + 1],
            &ring_angles[i],
            &ring_angles[i + 1],
            &mut triangles,
        );
    }
    // Fix orientation.
    for t in &mut triangles {
        if tri_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
    let outer = &ring_ids[rings];
    let boundary_edges: Vec<(usize, usize, i32)> = (0..outer.len())
        .map(|k| (outer[k], outer[(k + 1) % outer.len()], 1))
        .collect();
    let mut mesh = Mesh {
        nodes,
        triangles,
        boundary_edges,
        order: ElementOrder::Linear,
        tri_midside: Vec::new(),
        n_vertices: 0,
    };
    mesh.n_vertices = mesh.nodes.len();
    if order == ElementOrder::Quadratic {
        mesh = add_midside_nodes(mesh);
    }
    mesh.validate()?;
    Ok(mesh)
}

/// Structured square triangulation on [0, side]^2 with the crossed-diagonal
/// pattern: K x K cells, each split along a diagonal whose direction
/// alternates checkerboard-fashion. Mesh area is exactly side^2.
pub fn generate_square_mesh(side: f64, target_h: f64, order: ElementOrder) -> Result<Mesh> {
    if !(side > 0.0) || !target_h.is_finite() {
        return Err(Error::Config(format!("bad side {side} or h {target_h}")));
    }
    if !(target_h > 0.0 && target_h <= side) {
        return Err(Error::Mesh(format!(
            "target_h = {target_h} cannot resolve a square of side {side}"
        )));
    }
    let k = ((side / target_h).round() as usize).max(1);
    let dx = side / k as f64;
    let id = |i: usize, j: usize| j * (k + 1) + i;
    let mut nodes = Vec::with_capacity((k + 1) * (k + 1));
    for j in 0..=k {
        for i in 0..=k {
            nodes.push([i as f64 * dx, j as f64 * dx]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * k * k);
    for j in 0..k {
        for i in 0..k {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    let mut boundary_edges = Vec::with_capacity(4 * k);
    for i in 0..k {
        boundary_edges.push((id(i, 0), id(i + 1, 0), 1));
        boundary_edges.push((id(i + 1, k), id(i, k), 1));
    }
    for j in 0..k {
        boundary_edges.push((id(k, j), id(k, j + 1), 1));
        boundary_edges.push((id(0, j + 1), id(0, j), 1));
    }
    let mut mesh = Mesh {
        nodes,
        triangles,
        boundary_edges,
        order: ElementOrder::Linear,
        tri_midside: Vec::new(),
        n_vertices: (k + 1) * (k + 1),
    };
    if order == ElementOrder::Quadratic {
        mesh = add_midside_nodes(mesh);
    }
    mesh.validate()?;
    Ok(mesh)
}
