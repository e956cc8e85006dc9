//! Force-equilibrium mesh generator driven by a signed distance function.
//!
//! Points start on a jittered hexagonal grid, are filtered to the domain
//! interior, then move under repulsive edge forces while exterior points
//! are projected back onto the zero level set. The point set is Delaunay
//! retriangulated whenever anything moved far enough, and triangles whose
//! centroid falls outside the domain are discarded.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::LinearMesh;
use crate::error::{Error, Result};
use crate::geometry::SignedDistance;

/// Knobs of the iterative mesher. Force-loop constants (scale factor,
/// pseudo time step, retriangulation and termination tolerances) are fixed
/// at the customary values.
#[derive(Debug, Clone, Copy)]
pub struct MesherParams {
    /// Target edge length.
    pub h0: f64,
    /// Iteration budget before giving up.
    pub max_iters: usize,
    /// Seed for the initial grid jitter.
    pub seed: u64,
    /// Jitter amplitude as a fraction of `h0`.
    pub jitter: f64,
}

impl MesherParams {
    pub fn new(h0: f64) -> Self {
        Self {
            h0,
            max_iters: 5000,
            seed: 0,
            jitter: 0.05,
        }
    }
}

const FSCALE: f64 = 1.2;
const DT: f64 = 0.2;
/// Retriangulate when any point moved this fraction of h0.
const TTOL: f64 = 0.1;
/// Stop when interior forces move nothing more than this fraction of h0.
const DPTOL: f64 = 1e-3;
/// Geometry tolerance as a fraction of h0.
const GEPS_FRAC: f64 = 1e-3;
const DENSITY_CTRL_FREQ: usize = 30;

/// Generates a linear triangulation of the region where `sdf` is negative.
///
/// `fh` is the relative edge-length function (constant for uniform meshes),
/// `fixed` pins corner points that must appear as mesh vertices. The run is
/// deterministic for a given seed.
pub fn generate_linear_mesh(
    sdf: &SignedDistance,
    fh: &dyn Fn(f64, f64) -> f64,
    params: &MesherParams,
    fixed: &[[f64; 2]],
) -> Result<LinearMesh> {
    let h0 = params.h0;
    assert!(h0 > 0.0, "h0 must be positive");
    let geps = GEPS_FRAC * h0;
    let deps = f64::EPSILON.sqrt() * h0;
    let [xmin, ymin, xmax, ymax] = sdf.bounding_box;

    let mut rng = StdRng::seed_from_u64(params.seed);
    let jitter = params.jitter * h0;

    // Hexagonal candidate grid, jittered, filtered to the interior.
    let mut points: Vec<[f64; 2]> = Vec::new();
    let dy = h0 * 3f64.sqrt() / 2.0;
    let mut row = 0usize;
    let mut y = ymin;
    while y <= ymax + dy {
        let offset = if row % 2 == 1 { h0 / 2.0 } else { 0.0 };
        let mut x = xmin + offset;
        while x <= xmax + h0 {
            let jx = if jitter > 0.0 { rng.gen_range(-jitter..jitter) } else { 0.0 };
            let jy = if jitter > 0.0 { rng.gen_range(-jitter..jitter) } else { 0.0 };
            let p = [x + jx, y + jy];
            if sdf.eval(p[0], p[1]) < geps {
                points.push(p);
            }
            x += h0;
        }
        y += dy;
        row += 1;
    }

    // Probability-based thinning for non-uniform fh.
    let r0: Vec<f64> = points.iter().map(|p| 1.0 / fh(p[0], p[1]).powi(2)).collect();
    let r0max = r0.iter().cloned().fold(0.0, f64::max);
    if r0max > 0.0 {
        let mut kept = Vec::with_capacity(points.len());
        for (p, r) in points.iter().zip(&r0) {
            if rng.gen::<f64>() < r / r0max {
                kept.push(*p);
            }
        }
        points = kept;
    }

    // Fixed points go first and never move.
    let n_fix = fixed.len();
    points.retain(|p| {
        fixed
            .iter()
            .all(|f| (p[0] - f[0]).powi(2) + (p[1] - f[1]).powi(2) > (0.5 * h0).powi(2))
    });
    let mut all = fixed.to_vec();
    all.extend(points);
    let mut points = all;

    if points.len() < 3 {
        return Err(Error::DegenerateDomain { h0 });
    }

    let mut triangles = delaunay_interior(&points, sdf, geps)?;
    let mut bars = unique_edges(&triangles);
    let mut last_tri_pos = points.clone();
    let mut converged = false;
    let mut last_movement = f64::INFINITY;

    let mut iter = 0usize;
    while iter < params.max_iters {
        iter += 1;

        let needs_retri = last_tri_pos.len() != points.len()
            || points.iter().zip(&last_tri_pos).any(|(p, q)| {
                (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) > (TTOL * h0).powi(2)
            });
        if needs_retri {
            triangles = delaunay_interior(&points, sdf, geps)?;
            bars = unique_edges(&triangles);
            last_tri_pos = points.clone();
        }

        // Repulsive forces toward the scaled desired length.
        let mut lengths = Vec::with_capacity(bars.len());
        let mut hbars = Vec::with_capacity(bars.len());
        let mut l2sum = 0.0;
        let mut h2sum = 0.0;
        for &(a, b) in &bars {
            let d = [points[a][0] - points[b][0], points[a][1] - points[b][1]];
            let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
            let mid = [
                0.5 * (points[a][0] + points[b][0]),
                0.5 * (points[a][1] + points[b][1]),
            ];
            let hb = fh(mid[0], mid[1]);
            l2sum += l * l;
            h2sum += hb * hb;
            lengths.push(l);
            hbars.push(hb);
        }
        let scale = FSCALE * (l2sum / h2sum).sqrt();

        // Density control: drop the free endpoints of badly over-stretched
        // target bars, then retriangulate.
        if iter % DENSITY_CTRL_FREQ == 0 {
            let mut remove = vec![false; points.len()];
            let mut any = false;
            for (k, &(a, b)) in bars.iter().enumerate() {
                if hbars[k] * scale > 2.0 * lengths[k] {
                    for idx in [a, b] {
                        if idx >= n_fix {
                            remove[idx] = true;
                            any = true;
                        }
                    }
                }
            }
            if any {
                let mut kept = Vec::with_capacity(points.len());
                for (i, p) in points.iter().enumerate() {
                    if !remove[i] {
                        kept.push(*p);
                    }
                }
                points = kept;
                last_tri_pos.clear();
                continue;
            }
        }

        let mut force = vec![[0.0f64; 2]; points.len()];
        for (k, &(a, b)) in bars.iter().enumerate() {
            let l0 = hbars[k] * scale;
            let l = lengths[k];
            let f = (l0 - l).max(0.0);
            if f > 0.0 && l > 0.0 {
                let d = [points[a][0] - points[b][0], points[a][1] - points[b][1]];
                let fx = f * d[0] / l;
                let fy = f * d[1] / l;
                force[a][0] += fx;
                force[a][1] += fy;
                force[b][0] -= fx;
                force[b][1] -= fy;
            }
        }

        let mut interior_move2: f64 = 0.0;
        for i in n_fix..points.len() {
            let dx = DT * force[i][0];
            let dy = DT * force[i][1];
            points[i][0] += dx;
            points[i][1] += dy;
            if sdf.eval(points[i][0], points[i][1]) < -geps {
                interior_move2 = interior_move2.max(dx * dx + dy * dy);
            }
        }

        // Project exterior points back onto the boundary along the
        // numerical gradient of the distance field.
        for i in n_fix..points.len() {
            let d = sdf.eval(points[i][0], points[i][1]);
            if d > 0.0 {
                project_onto_boundary(sdf, &mut points[i], d, deps);
            }
        }

        last_movement = interior_move2.sqrt() / h0;
        if last_movement < DPTOL {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(Error::MeshNotConverged {
            iters: params.max_iters,
            movement: last_movement,
        });
    }

    // Pin every near-boundary point tightly onto the zero level set, then
    // triangulate the settled points once more.
    for i in n_fix..points.len() {
        let d = sdf.eval(points[i][0], points[i][1]);
        if d.abs() < geps {
            project_onto_boundary(sdf, &mut points[i], d, deps);
        }
    }
    let triangles = delaunay_interior(&points, sdf, geps)?;

    // Drop unreferenced points (projection can strand a few on corners).
    let mut used = vec![false; points.len()];
    for t in &triangles {
        for &v in t {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut vertices = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if used[i] {
            remap[i] = vertices.len();
            vertices.push(*p);
        }
    }
    let triangles: Vec<[usize; 3]> = triangles
        .iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();

    let boundary = vertices
        .iter()
        .map(|p| sdf.eval(p[0], p[1]).abs() <= geps)
        .collect();

    Ok(LinearMesh {
        vertices,
        triangles,
        boundary,
        h: h0,
    })
}

/// A few Newton steps along the numerical distance gradient.
fn project_onto_boundary(sdf: &SignedDistance, p: &mut [f64; 2], d0: f64, deps: f64) {
    let mut d = d0;
    for _ in 0..3 {
        let gx = (sdf.eval(p[0] + deps, p[1]) - d) / deps;
        let gy = (sdf.eval(p[0], p[1] + deps) - d) / deps;
        let g2 = gx * gx + gy * gy;
        if g2 < 1e-12 {
            return;
        }
        p[0] -= d * gx / g2;
        p[1] -= d * gy / g2;
        d = sdf.eval(p[0], p[1]);
        if d.abs() < 1e-13 {
            return;
        }
    }
}

/// Delaunay triangulation restricted to triangles whose centroid lies
/// inside the domain, oriented counter-clockwise.
fn delaunay_interior(
    points: &[[f64; 2]],
    sdf: &SignedDistance,
    geps: f64,
) -> Result<Vec<[usize; 3]>> {
    let input: Vec<delaunator::Point> = points
        .iter()
        .map(|p| delaunator::Point { x: p[0], y: p[1] })
        .collect();
    let tri = delaunator::triangulate(&input);
    let mut out = Vec::with_capacity(tri.triangles.len() / 3);
    for t in tri.triangles.chunks_exact(3) {
        let (a, b, c) = (t[0], t[1], t[2]);
        let cx = (points[a][0] + points[b][0] + points[c][0]) / 3.0;
        let cy = (points[a][1] + points[b][1] + points[c][1]) / 3.0;
        if sdf.eval(cx, cy) < -geps {
            let area2 = (points[b][0] - points[a][0]) * (points[c][1] - points[a][1])
                - (points[c][0] - points[a][0]) * (points[b][1] - points[a][1]);
            if area2 > 0.0 {
                out.push([a, b, c]);
            } else {
                out.push([a, c, b]);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateDomain { h0: geps / GEPS_FRAC });
    }
    Ok(out)
}

fn unique_edges(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| {
            [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])]
                .into_iter()
                .map(|(a, b)| (a.min(b), a.max(b)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset, PresetName};

    #[test]
    fn unit_square_mesh_is_sane() {
        let p = preset(PresetName::UnitSquare);
        let params = MesherParams::new(0.15);
        let mesh = generate_linear_mesh(&p.sdf, &|_, _| 1.0, &params, &p.fixed_points).unwrap();
        assert!(mesh.triangles.len() > 50);
        for t in 0..mesh.triangles.len() {
            assert!(mesh.signed_area2(t) > 0.0);
        }
        // all four corners survive as vertices
        for c in &p.fixed_points {
            assert!(mesh
                .vertices
                .iter()
                .any(|v| (v[0] - c[0]).abs() < 1e-12 && (v[1] - c[1]).abs() < 1e-12));
        }
        // boundary vertices sit on the zero level set
        for (v, b) in mesh.vertices.iter().zip(&mesh.boundary) {
            if *b {
                assert!(p.sdf.eval(v[0], v[1]).abs() <= 1e-3 * 0.15);
            }
        }
        let area: f64 = (0..mesh.triangles.len())
            .map(|t| 0.5 * mesh.signed_area2(t))
            .sum();
        assert!((area - 1.0).abs() < 0.02, "area {}", area);
    }

    #[test]
    fn mesh_generation_is_deterministic() {
        let p = preset(PresetName::VNotch);
        let params = MesherParams {
            h0: 0.12,
            max_iters: 3000,
            seed: 7,
            jitter: 0.05,
        };
        let a = generate_linear_mesh(&p.sdf, &|_, _| 1.0, &params, &p.fixed_points).unwrap();
        let b = generate_linear_mesh(&p.sdf, &|_, _| 1.0, &params, &p.fixed_points).unwrap();
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.triangles, b.triangles);
    }

    #[test]
    fn interior_edges_shared_by_two_triangles() {
        let p = preset(PresetName::UnitSquare);
        let params = MesherParams::new(0.2);
        let mesh = generate_linear_mesh(&p.sdf, &|_, _| 1.0, &params, &p.fixed_points).unwrap();
        use std::collections::BTreeMap;
        let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &mesh.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &count {
            assert!(c == 1 || c == 2, "edge ({a},{b}) shared by {c}");
            if c == 1 {
                assert!(mesh.boundary[a] && mesh.boundary[b]);
            }
        }
    }

    #[test]
    fn degenerate_domain_is_reported() {
        let p = preset(PresetName::UnitSquare);
        // spacing larger than the whole square
        let params = MesherParams::new(5.0);
        let r = generate_linear_mesh(&p.sdf, &|_, _| 1.0, &params, &[]);
        assert!(matches!(
            r,
            Err(Error::DegenerateDomain { .. }) | Err(Error::MeshNotConverged { .. })
        ));
    }
}
