//! Cubic triangular reference element.
//!
//! The reference element is the unit right triangle {xi >= 0, eta >= 0,
//! xi + eta <= 1} carrying ten Lagrange nodes: the three vertices, two
//! nodes at the thirds of every edge and one interior node at the
//! centroid. Physical elements may have one curved (parabolic) edge
//! between local vertices 1 and 2; the other two edges are straight.

pub mod quadrature;

pub use quadrature::{quadrature_rule, QuadratureRule};

use crate::error::{Error, Result};

/// Nodes of the cubic triangle.
pub const NODE_COUNT: usize = 10;

/// Polynomial order of the element.
pub const ORDER: usize = 3;

/// Local node coordinates (xi, eta) in reference ordering: vertices 1-3,
/// edge nodes 4-9 (two per edge, counter-clockwise), interior node 10.
pub const REFERENCE_NODES: [[f64; 2]; NODE_COUNT] = [
    [1.0, 0.0],
    [0.0, 1.0],
    [0.0, 0.0],
    [2.0 / 3.0, 1.0 / 3.0],
    [1.0 / 3.0, 2.0 / 3.0],
    [0.0, 2.0 / 3.0],
    [0.0, 1.0 / 3.0],
    [1.0 / 3.0, 0.0],
    [2.0 / 3.0, 0.0],
    [1.0 / 3.0, 1.0 / 3.0],
];

/// Evaluates the ten cubic shape functions at (xi, eta).
pub fn shape_values(xi: f64, eta: f64) -> [f64; NODE_COUNT] {
    let x = xi;
    let e = eta;
    let x2 = x * x;
    let x3 = x2 * x;
    let e2 = e * e;
    let e3 = e2 * e;
    [
        4.5 * x3 - 4.5 * x2 + x,
        4.5 * e3 - 4.5 * e2 + e,
        -4.5 * x3 - 4.5 * e3 - 13.5 * x2 * e - 13.5 * x * e2 + 9.0 * x2 + 9.0 * e2 + 18.0 * x * e
            - 5.5 * x
            - 5.5 * e
            + 1.0,
        13.5 * x2 * e - 4.5 * x * e,
        13.5 * x * e2 - 4.5 * x * e,
        -13.5 * e3 - 13.5 * x * e2 + 18.0 * e2 + 4.5 * x * e - 4.5 * e,
        13.5 * e3 + 27.0 * x * e2 + 13.5 * x2 * e - 22.5 * e2 - 22.5 * x * e + 9.0 * e,
        13.5 * x3 + 27.0 * x2 * e + 13.5 * x * e2 - 22.5 * x2 - 22.5 * x * e + 9.0 * x,
        -13.5 * x3 - 13.5 * x2 * e + 18.0 * x2 + 4.5 * x * e - 4.5 * x,
        -27.0 * x * e2 - 27.0 * x2 * e + 27.0 * x * e,
    ]
}

/// One-dimensional Lagrange factors on nodes {0, 1/3, 2/3, 1}.
fn lambda1(s: f64) -> f64 {
    3.0 * s
}

fn lambda2(s: f64) -> f64 {
    4.5 * (s * s - s / 3.0)
}

fn lambda3(s: f64) -> f64 {
    0.5 * (9.0 * s * s * s - 9.0 * s * s + 2.0 * s)
}

/// Evaluates the shape functions through their product factorisation in the
/// barycentric coordinates (xi, eta, delta) with delta = 1 - xi - eta.
///
/// This is an independent algebraic route to the same polynomials as
/// [`shape_values`]; the two are checked against each other in the tests.
pub fn shape_values_product_form(xi: f64, eta: f64) -> [f64; NODE_COUNT] {
    let d = 1.0 - xi - eta;
    [
        lambda3(xi),
        lambda3(eta),
        lambda3(d),
        lambda2(xi) * lambda1(eta),
        lambda1(xi) * lambda2(eta),
        lambda2(eta) * lambda1(d),
        lambda1(eta) * lambda2(d),
        lambda1(xi) * lambda2(d),
        lambda2(xi) * lambda1(d),
        lambda1(xi) * lambda1(eta) * lambda1(d),
    ]
}

/// Analytic partial derivatives (d/dxi, d/deta) of the shape functions.
pub fn shape_gradients(xi: f64, eta: f64) -> [[f64; 2]; NODE_COUNT] {
    let x = xi;
    let e = eta;
    let d = 1.0 - x - e;
    // dN3/dxi = dN3/deta = -lambda3'(delta)
    let l3d = 0.5 * (27.0 * d * d - 18.0 * d + 2.0);
    let l2x = 4.5 * (x * x - x / 3.0);
    let l2e = 4.5 * (e * e - e / 3.0);
    let l2d = 4.5 * (d * d - d / 3.0);
    let dl2x = 9.0 * x - 1.5;
    let dl2e = 9.0 * e - 1.5;
    let dl2d = 9.0 * d - 1.5;
    [
        [0.5 * (27.0 * x * x - 18.0 * x + 2.0), 0.0],
        [0.0, 0.5 * (27.0 * e * e - 18.0 * e + 2.0)],
        [-l3d, -l3d],
        [4.5 * e * (6.0 * x - 1.0), 13.5 * x * x - 4.5 * x],
        [13.5 * e * e - 4.5 * e, 4.5 * x * (6.0 * e - 1.0)],
        [-3.0 * l2e, 3.0 * (d * dl2e - l2e)],
        [-3.0 * e * dl2d, 3.0 * (l2d - e * dl2d)],
        [3.0 * (l2d - x * dl2d), -3.0 * x * dl2d],
        [3.0 * (d * dl2x - l2x), -3.0 * l2x],
        [27.0 * e * (d - x), 27.0 * x * (d - e)],
    ]
}

/// Physical geometry of one cubic element: the ten node coordinates in
/// reference ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub nodes: [[f64; 2]; NODE_COUNT],
    pub is_curved: bool,
}

impl ElementGeometry {
    pub fn new(nodes: [[f64; 2]; NODE_COUNT], is_curved: bool) -> Self {
        Self { nodes, is_curved }
    }

    /// Coefficient of the xi*eta blending term, per coordinate. Zero (to
    /// rounding) whenever the edge-12 nodes sit at the exact thirds.
    pub fn blending_coefficient(&self) -> [f64; 2] {
        let n = &self.nodes;
        [
            2.25 * ((n[3][0] + n[4][0]) - (n[0][0] + n[1][0])),
            2.25 * ((n[3][1] + n[4][1]) - (n[0][1] + n[1][1])),
        ]
    }

    /// Maps a reference point to physical coordinates through the cubic
    /// point transformation
    /// `t = t3 + (t1 - t3) xi + (t2 - t3) eta + 9/4 [(t4 + t5) - (t1 + t2)] xi eta`.
    pub fn map_point(&self, xi: f64, eta: f64) -> [f64; 2] {
        let n = &self.nodes;
        let c = self.blending_coefficient();
        [
            n[2][0] + (n[0][0] - n[2][0]) * xi + (n[1][0] - n[2][0]) * eta + c[0] * xi * eta,
            n[2][1] + (n[0][1] - n[2][1]) * xi + (n[1][1] - n[2][1]) * eta + c[1] * xi * eta,
        ]
    }

    /// Jacobian matrix [[dx/dxi, dx/deta], [dy/dxi, dy/deta]] of the point
    /// transformation together with its determinant.
    ///
    /// Fails when the determinant at the evaluation point is below the
    /// singularity threshold 1e-14 * diameter^2.
    pub fn jacobian(&self, xi: f64, eta: f64) -> Result<([[f64; 2]; 2], f64)> {
        let n = &self.nodes;
        let c = self.blending_coefficient();
        let j = [
            [n[0][0] - n[2][0] + c[0] * eta, n[1][0] - n[2][0] + c[0] * xi],
            [n[0][1] - n[2][1] + c[1] * eta, n[1][1] - n[2][1] + c[1] * xi],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det <= 1e-14 * self.diameter_sq() {
            return Err(Error::SingularJacobian { det });
        }
        Ok((j, det))
    }

    /// Gradients of the shape functions with respect to physical (x, y).
    pub fn physical_gradients(&self, xi: f64, eta: f64) -> Result<[[f64; 2]; NODE_COUNT]> {
        let (j, det) = self.jacobian(xi, eta)?;
        let ref_grads = shape_gradients(xi, eta);
        // J^{-T} through the explicit 2x2 adjugate.
        let inv_t = [
            [j[1][1] / det, -j[1][0] / det],
            [-j[0][1] / det, j[0][0] / det],
        ];
        let mut out = [[0.0; 2]; NODE_COUNT];
        for (o, g) in out.iter_mut().zip(ref_grads.iter()) {
            o[0] = inv_t[0][0] * g[0] + inv_t[0][1] * g[1];
            o[1] = inv_t[1][0] * g[0] + inv_t[1][1] * g[1];
        }
        Ok(out)
    }

    /// Interpolates a nodal field at a reference point.
    pub fn interpolate(&self, values: &[f64; NODE_COUNT], xi: f64, eta: f64) -> f64 {
        shape_values(xi, eta)
            .iter()
            .zip(values.iter())
            .map(|(n, v)| n * v)
            .sum()
    }

    fn diameter_sq(&self) -> f64 {
        let n = &self.nodes;
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for k in (i + 1)..3 {
                let dx = n[i][0] - n[k][0];
                let dy = n[i][1] - n[k][1];
                d = d.max(dx * dx + dy * dy);
            }
        }
        d
    }
}
