//! Mesh generation: a signed-distance force-equilibrium triangulator for
//! linear meshes, a structured mode for the square benchmark, and the
//! enrichment of linear triangles to ten-node cubic elements with exact
//! curved-edge node placement next to circular inclusions.

mod cubic;
mod distmesh;

pub use cubic::{enrich_to_cubic, enrich_to_cubic_with, EnrichOptions};
pub use distmesh::{generate_linear_mesh, MesherParams};

use crate::element::{ElementGeometry, NODE_COUNT};
use crate::geometry::CircleArc;

/// Straight-edged triangulation. Triangles are counter-clockwise.
#[derive(Debug, Clone)]
pub struct LinearMesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// Representative edge length the mesh was generated at.
    pub h: f64,
}

impl LinearMesh {
    /// Twice the signed area of triangle `t`.
    pub fn signed_area2(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (p, q, r) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1])
    }

    /// Radius-ratio quality 2 r_in / r_circ; 1 for equilateral triangles.
    pub fn quality(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let a = d(self.vertices[j], self.vertices[k]);
        let b = d(self.vertices[k], self.vertices[i]);
        let c = d(self.vertices[i], self.vertices[j]);
        (b + c - a) * (c + a - b) * (a + b - c) / (a * b * c)
    }

    pub fn min_quality(&self) -> f64 {
        (0..self.triangles.len()).fold(f64::INFINITY, |m, t| m.min(self.quality(t)))
    }
}

/// Uniform structured triangulation of the unit square into `2 n^2`
/// triangles (each grid cell split along its up-diagonal). `n = 2`
/// reproduces the eight-element benchmark layout.
pub fn structured_square_mesh(n: usize) -> LinearMesh {
    assert!(n >= 1);
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    let mut boundary = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
            boundary.push(i == 0 || i == n || j == 0 || j == n);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    LinearMesh {
        vertices,
        triangles,
        boundary,
        h: 1.0 / n as f64,
    }
}

/// One node of a cubic mesh; `tag` names the boundary piece it lies on.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub x: f64,
    pub y: f64,
    pub tag: Option<String>,
}

/// Descriptor of the single curved edge of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvedEdge {
    /// Local edge index; the construction always rotates the curved edge
    /// into edge 1 (between local vertices 1 and 2).
    pub local_edge: u8,
    /// Index into [`CubicMesh::arcs`].
    pub arc: usize,
}

/// Ten-node element in reference ordering: vertices, edge-12 pair,
/// edge-23 pair, edge-31 pair, interior node.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicElement {
    pub nodes: [usize; NODE_COUNT],
    pub curved: Option<CurvedEdge>,
}

/// Mesh of ten-node cubic triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicMesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<CubicElement>,
    pub arcs: Vec<CircleArc>,
    /// Vertex and unique-edge counts of the underlying linear mesh.
    pub vertex_count: usize,
    pub edge_count: usize,
}

/// Element / dof / boundary-point counts, as tabulated in mesh reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshReport {
    pub elements: usize,
    pub dof: usize,
    pub boundary_points: usize,
}

impl CubicMesh {
    pub fn dof_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn boundary_point_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.tag.is_some()).count()
    }

    pub fn dof_report(&self) -> MeshReport {
        MeshReport {
            elements: self.elements.len(),
            dof: self.dof_count(),
            boundary_points: self.boundary_point_count(),
        }
    }

    /// Physical geometry of element `e` in reference node ordering.
    pub fn element_geometry(&self, e: usize) -> ElementGeometry {
        let el = &self.elements[e];
        let mut nodes = [[0.0; 2]; NODE_COUNT];
        for (slot, &id) in nodes.iter_mut().zip(el.nodes.iter()) {
            slot[0] = self.nodes[id].x;
            slot[1] = self.nodes[id].y;
        }
        ElementGeometry::new(nodes, el.curved.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_two_by_two_square() {
        let m = structured_square_mesh(2);
        assert_eq!(m.triangles.len(), 8);
        assert_eq!(m.vertices.len(), 9);
        assert_eq!(m.boundary.iter().filter(|b| **b).count(), 8);
        for t in 0..m.triangles.len() {
            assert!(m.signed_area2(t) > 0.0);
        }
        // total area is the unit square
        let area: f64 = (0..m.triangles.len()).map(|t| 0.5 * m.signed_area2(t)).sum();
        assert!((area - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn structured_quality_is_constant() {
        let m = structured_square_mesh(4);
        // right isosceles triangles all share the same radius ratio
        let q0 = m.quality(0);
        for t in 0..m.triangles.len() {
            assert!((m.quality(t) - q0).abs() <= 1e-12);
        }
        assert!(m.min_quality() > 0.6);
    }
}
