//! Enrichment of a linear triangulation to ten-node cubic elements.
//!
//! Straight edges receive nodes at their exact thirds. A boundary edge
//! whose endpoints lie on an inclusion arc becomes the curved edge of its
//! element: the edge is rotated into local position 1-2, the first edge
//! node t4 is placed on the true arc at one third of the arc length, and
//! the companion nodes follow the nodal relations
//!
//! ```text
//! t5  = t4 - (t1 - t2) / 3
//! t10 = (t1 + t2 + 4 t3 + 3 t4 + 3 t5) / 12
//! ```
//!
//! which make the cubic point transformation interpolate all of them. For
//! straight edges the same t10 formula reduces to the centroid.

use std::collections::BTreeMap;

use super::{CubicElement, CubicMesh, CurvedEdge, LinearMesh, Node};
use crate::error::{Error, Result};
use crate::geometry::DomainPreset;

#[derive(Debug, Clone, Copy)]
pub struct EnrichOptions {
    /// Largest arc angle (radians) one curved edge may subtend; wider arcs
    /// are rejected as under-resolved.
    pub max_arc_angle: f64,
}

impl Default for EnrichOptions {
    fn default() -> Self {
        Self {
            max_arc_angle: std::f64::consts::FRAC_PI_2,
        }
    }
}

pub fn enrich_to_cubic(lin: &LinearMesh, preset: &DomainPreset) -> Result<CubicMesh> {
    enrich_to_cubic_with(lin, preset, &EnrichOptions::default())
}

pub fn enrich_to_cubic_with(
    lin: &LinearMesh,
    preset: &DomainPreset,
    opts: &EnrichOptions,
) -> Result<CubicMesh> {
    let geps = 1e-3 * lin.h;

    // Boundary vertices within the geometry tolerance of an arc are pinned
    // exactly onto it; everything downstream treats them as arc points.
    let mut vertices = lin.vertices.clone();
    let mut vertex_arc: Vec<Option<usize>> = vec![None; vertices.len()];
    for (v, p) in vertices.iter_mut().enumerate() {
        if !lin.boundary[v] {
            continue;
        }
        for (ai, arc) in preset.curved_arcs.iter().enumerate() {
            if arc.distance(*p).abs() <= geps {
                let angle = arc.angle_of(*p);
                *p = arc.point_at(angle);
                vertex_arc[v] = Some(ai);
                break;
            }
        }
    }

    // Edge adjacency; an edge used once is a boundary edge.
    let mut adjacency: BTreeMap<(usize, usize), u8> = BTreeMap::new();
    for t in &lin.triangles {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            *adjacency.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }

    // Rotate each triangle so a curved edge, if any, is its 1-2 edge.
    let mut rotated: Vec<([usize; 3], Option<usize>)> = Vec::with_capacity(lin.triangles.len());
    for (ti, t) in lin.triangles.iter().enumerate() {
        let mut curved: Vec<(usize, usize)> = Vec::new(); // (edge slot, arc)
        for (slot, (a, b)) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])].into_iter().enumerate() {
            let key = (a.min(b), a.max(b));
            if adjacency[&key] != 1 {
                continue;
            }
            if let (Some(ai), Some(bi)) = (vertex_arc[a], vertex_arc[b]) {
                if ai == bi {
                    curved.push((slot, ai));
                }
            }
        }
        match curved.len() {
            0 => rotated.push((*t, None)),
            1 => {
                let (slot, arc) = curved[0];
                let order = match slot {
                    0 => [t[0], t[1], t[2]],
                    1 => [t[1], t[2], t[0]],
                    _ => [t[2], t[0], t[1]],
                };
                rotated.push((order, Some(arc)));
            }
            n => {
                return Err(Error::MultipleCurvedEdges { element: ti, count: n });
            }
        }
    }

    // Global nodes: linear vertices first, then edge and interior nodes in
    // element order.
    let mut nodes: Vec<Node> = vertices
        .iter()
        .map(|p| Node {
            x: p[0],
            y: p[1],
            tag: None,
        })
        .collect();

    struct EdgeSlot {
        ids: [usize; 2],
        /// Vertex the two nodes are ordered from.
        from: usize,
        arc: Option<usize>,
    }
    let mut edge_slots: BTreeMap<(usize, usize), EdgeSlot> = BTreeMap::new();
    let mut elements = Vec::with_capacity(rotated.len());

    for (ti, (tri, arc_idx)) in rotated.iter().enumerate() {
        let [v1, v2, v3] = *tri;
        let mut ids = [0usize; 10];
        ids[0] = v1;
        ids[1] = v2;
        ids[2] = v3;

        let mut edge_nodes = |a: usize,
                              b: usize,
                              arc: Option<usize>,
                              nodes: &mut Vec<Node>|
         -> Result<[usize; 2]> {
            let key = (a.min(b), a.max(b));
            if let Some(slot) = edge_slots.get(&key) {
                return Ok(if slot.from == a {
                    slot.ids
                } else {
                    [slot.ids[1], slot.ids[0]]
                });
            }
            let pa = [nodes[a].x, nodes[a].y];
            let pb = [nodes[b].x, nodes[b].y];
            let (n1, n2) = match arc {
                None => (
                    [pa[0] + (pb[0] - pa[0]) / 3.0, pa[1] + (pb[1] - pa[1]) / 3.0],
                    [pa[0] + 2.0 * (pb[0] - pa[0]) / 3.0, pa[1] + 2.0 * (pb[1] - pa[1]) / 3.0],
                ),
                Some(ai) => {
                    let arc = &preset.curved_arcs[ai];
                    let phi_a = arc.angle_of(pa);
                    let mut dphi = arc.angle_of(pb) - phi_a;
                    while dphi > std::f64::consts::PI {
                        dphi -= 2.0 * std::f64::consts::PI;
                    }
                    while dphi < -std::f64::consts::PI {
                        dphi += 2.0 * std::f64::consts::PI;
                    }
                    if dphi.abs() > opts.max_arc_angle {
                        return Err(Error::ArcUnderResolved {
                            element: ti,
                            angle: dphi.abs(),
                            limit: opts.max_arc_angle,
                        });
                    }
                    let t4 = arc.point_at(phi_a + dphi / 3.0);
                    let t5 = [t4[0] - (pa[0] - pb[0]) / 3.0, t4[1] - (pa[1] - pb[1]) / 3.0];
                    (t4, t5)
                }
            };
            let id1 = nodes.len();
            nodes.push(Node { x: n1[0], y: n1[1], tag: None });
            let id2 = nodes.len();
            nodes.push(Node { x: n2[0], y: n2[1], tag: None });
            edge_slots.insert(
                key,
                EdgeSlot {
                    ids: [id1, id2],
                    from: a,
                    arc,
                },
            );
            Ok([id1, id2])
        };

        let e12 = edge_nodes(v1, v2, *arc_idx, &mut nodes)?;
        let e23 = edge_nodes(v2, v3, None, &mut nodes)?;
        let e31 = edge_nodes(v3, v1, None, &mut nodes)?;
        ids[3] = e12[0];
        ids[4] = e12[1];
        ids[5] = e23[0];
        ids[6] = e23[1];
        ids[7] = e31[0];
        ids[8] = e31[1];

        // interior node from the nodal relation
        let g = |i: usize| [nodes[ids[i]].x, nodes[ids[i]].y];
        let (t1, t2, t3, t4, t5) = (g(0), g(1), g(2), g(3), g(4));
        let t10 = [
            (t1[0] + t2[0] + 4.0 * t3[0] + 3.0 * t4[0] + 3.0 * t5[0]) / 12.0,
            (t1[1] + t2[1] + 4.0 * t3[1] + 3.0 * t4[1] + 3.0 * t5[1]) / 12.0,
        ];
        ids[9] = nodes.len();
        nodes.push(Node { x: t10[0], y: t10[1], tag: None });

        elements.push(CubicElement {
            nodes: ids,
            curved: arc_idx.map(|arc| CurvedEdge { local_edge: 1, arc }),
        });
    }

    // Tags: vertices flagged as boundary, plus all nodes created on
    // boundary edges. Arc nodes take the arc's tag directly (t5 sits on the
    // parabolic edge, close to but not exactly on the circle).
    let arc_tags: Vec<Option<String>> = preset
        .curved_arcs
        .iter()
        .map(|arc| {
            preset.boundary_segments.iter().find_map(|seg| match &seg.shape {
                crate::geometry::SegmentShape::Arc(a) if a == arc => Some(seg.tag.clone()),
                _ => None,
            })
        })
        .collect();
    for (v, &flag) in lin.boundary.iter().enumerate() {
        if !flag {
            continue;
        }
        let tag = match vertex_arc[v].and_then(|ai| arc_tags[ai].clone()) {
            Some(t) => t,
            None => classify(preset, [nodes[v].x, nodes[v].y], geps)?,
        };
        nodes[v].tag = Some(tag);
    }
    for (&(a, b), slot) in &edge_slots {
        if adjacency[&(a, b)] != 1 {
            continue;
        }
        for id in slot.ids {
            let tag = match slot.arc {
                Some(ai) => arc_tags[ai].clone(),
                None => None,
            };
            let tag = match tag {
                Some(t) => t,
                None => classify(preset, [nodes[id].x, nodes[id].y], geps)?,
            };
            nodes[id].tag = Some(tag);
        }
    }

    Ok(CubicMesh {
        nodes,
        elements,
        arcs: preset.curved_arcs.clone(),
        vertex_count: vertices.len(),
        edge_count: edge_slots.len(),
    })
}

fn classify(preset: &DomainPreset, p: [f64; 2], geps: f64) -> Result<String> {
    for tol in [1e-9, 1e-6, 5.0 * geps] {
        if let Some(tag) = preset.classify(p, tol) {
            return Ok(tag.to_string());
        }
    }
    Err(Error::UnknownTag(format!(
        "boundary node at ({}, {}) lies on no tagged segment",
        p[0], p[1]
    )))
}
