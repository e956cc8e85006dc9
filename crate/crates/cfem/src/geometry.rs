//! Signed distance functions and the benchmark domain presets.
//!
//! Distances are negative inside the domain, zero on its boundary and
//! positive outside. The rectangle, circle and polygon distances are exact
//! (hence 1-Lipschitz); the difference combination is the usual
//! approximation `max(d_A, -d_B)`, exact away from the cut region's edges.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exact signed distance to an axis-aligned rectangle `[lo, hi]`.
pub fn sdf_rectangle(p: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let dx = (lo[0] - p[0]).max(p[0] - hi[0]);
    let dy = (lo[1] - p[1]).max(p[1] - hi[1]);
    if dx <= 0.0 && dy <= 0.0 {
        dx.max(dy)
    } else {
        let ox = dx.max(0.0);
        let oy = dy.max(0.0);
        (ox * ox + oy * oy).sqrt()
    }
}

/// Signed distance to a circle of radius `r`.
pub fn sdf_circle(p: [f64; 2], center: [f64; 2], r: f64) -> f64 {
    ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt() - r
}

/// Set difference `A \ B` in signed-distance form: `max(d_A, -d_B)`.
pub fn sdf_difference(da: f64, db: f64) -> f64 {
    da.max(-db)
}

/// Exact signed distance to a simple polygon (either orientation).
pub fn sdf_polygon(p: [f64; 2], vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    let mut d = f64::INFINITY;
    let mut sign = 1.0;
    let mut j = n - 1;
    for i in 0..n {
        let e = [vertices[j][0] - vertices[i][0], vertices[j][1] - vertices[i][1]];
        let w = [p[0] - vertices[i][0], p[1] - vertices[i][1]];
        let t = ((w[0] * e[0] + w[1] * e[1]) / (e[0] * e[0] + e[1] * e[1])).clamp(0.0, 1.0);
        let b = [w[0] - e[0] * t, w[1] - e[1] * t];
        d = d.min(b[0] * b[0] + b[1] * b[1]);
        // winding parity flip
        let c0 = p[1] >= vertices[i][1];
        let c1 = p[1] < vertices[j][1];
        let c2 = e[0] * w[1] > e[1] * w[0];
        if (c0 && c1 && c2) || (!c0 && !c1 && !c2) {
            sign = -sign;
        }
        j = i;
    }
    sign * d.sqrt()
}

/// Shape tree backing a [`SignedDistance`].
#[derive(Debug, Clone)]
pub enum Sdf {
    Rectangle { lo: [f64; 2], hi: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    Difference(Box<Sdf>, Box<Sdf>),
}

impl Sdf {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        match self {
            Sdf::Rectangle { lo, hi } => sdf_rectangle(p, *lo, *hi),
            Sdf::Circle { center, radius } => sdf_circle(p, *center, *radius),
            Sdf::Polygon { vertices } => sdf_polygon(p, vertices),
            Sdf::Difference(a, b) => sdf_difference(a.eval(p), b.eval(p)),
        }
    }
}

/// A signed distance field with the bounding box of its zero level set.
#[derive(Debug, Clone)]
pub struct SignedDistance {
    pub shape: Sdf,
    /// (xmin, ymin, xmax, ymax)
    pub bounding_box: [f64; 4],
}

impl SignedDistance {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.shape.eval([x, y])
    }
}

/// A full circle used as an internal inclusion boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleArc {
    pub center: [f64; 2],
    pub radius: f64,
}

impl CircleArc {
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        sdf_circle(p, self.center, self.radius)
    }

    /// Angle of `p` as seen from the centre.
    pub fn angle_of(&self, p: [f64; 2]) -> f64 {
        (p[1] - self.center[1]).atan2(p[0] - self.center[0])
    }

    pub fn point_at(&self, angle: f64) -> [f64; 2] {
        [
            self.center[0] + self.radius * angle.cos(),
            self.center[1] + self.radius * angle.sin(),
        ]
    }
}

/// Geometric description of one tagged boundary piece.
#[derive(Debug, Clone)]
pub enum SegmentShape {
    Line { a: [f64; 2], b: [f64; 2] },
    Arc(CircleArc),
}

impl SegmentShape {
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match self {
            SegmentShape::Line { a, b } => {
                let e = [b[0] - a[0], b[1] - a[1]];
                let w = [p[0] - a[0], p[1] - a[1]];
                let t = ((w[0] * e[0] + w[1] * e[1]) / (e[0] * e[0] + e[1] * e[1]))
                    .clamp(0.0, 1.0);
                let d = [w[0] - e[0] * t, w[1] - e[1] * t];
                (d[0] * d[0] + d[1] * d[1]).sqrt()
            }
            SegmentShape::Arc(arc) => arc.distance(p).abs(),
        }
    }

    /// Point at parameter `t` in [0, 1] along the piece.
    pub fn point_at(&self, t: f64) -> [f64; 2] {
        match self {
            SegmentShape::Line { a, b } => [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t],
            SegmentShape::Arc(arc) => arc.point_at(2.0 * std::f64::consts::PI * t),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundarySegment {
    pub tag: String,
    pub shape: SegmentShape,
}

/// Names of the built-in benchmark domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    UnitSquare,
    VNotch,
    VNotchWithInclusion,
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PresetName::UnitSquare => "unit_square",
            PresetName::VNotch => "vnotch",
            PresetName::VNotchWithInclusion => "vnotch_with_inclusion",
        })
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_square" => Ok(PresetName::UnitSquare),
            "vnotch" => Ok(PresetName::VNotch),
            "vnotch_with_inclusion" => Ok(PresetName::VNotchWithInclusion),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Adjustable dimensions of the notched domains. The defaults reproduce the
/// benchmark meshes; any geometry with the same tag structure may be
/// substituted through the run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryParams {
    /// Half-width of the notch mouth on the right edge.
    pub notch_mouth_half_width: f64,
    /// Horizontal depth of the notch tip.
    pub notch_depth: f64,
    pub inclusion_center: [f64; 2],
    pub inclusion_radius: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            notch_mouth_half_width: 0.2,
            notch_depth: 0.4,
            inclusion_center: [0.3, 0.5],
            inclusion_radius: 0.15,
        }
    }
}

/// A benchmark domain: its signed distance field, tagged boundary pieces,
/// corner points pinned during meshing and any internal arcs.
#[derive(Debug, Clone)]
pub struct DomainPreset {
    pub name: PresetName,
    pub sdf: SignedDistance,
    pub boundary_segments: Vec<BoundarySegment>,
    pub fixed_points: Vec<[f64; 2]>,
    pub curved_arcs: Vec<CircleArc>,
}

impl DomainPreset {
    /// Tag of the boundary piece within `tol` of `p`, searching segments in
    /// their stored order (corner points resolve to the earlier tag).
    pub fn classify(&self, p: [f64; 2], tol: f64) -> Option<&str> {
        self.boundary_segments
            .iter()
            .find(|s| s.shape.distance(p) <= tol)
            .map(|s| s.tag.as_str())
    }
}

/// Builds a preset with default dimensions.
pub fn preset(name: PresetName) -> DomainPreset {
    preset_with(name, &GeometryParams::default())
}

/// Builds a preset from a name string.
pub fn preset_by_name(name: &str) -> Result<DomainPreset> {
    Ok(preset(name.parse()?))
}

/// Builds a preset with explicit dimensions.
pub fn preset_with(name: PresetName, params: &GeometryParams) -> DomainPreset {
    match name {
        PresetName::UnitSquare => unit_square(),
        PresetName::VNotch => vnotch(params, false),
        PresetName::VNotchWithInclusion => vnotch(params, true),
    }
}

fn line(tag: &str, a: [f64; 2], b: [f64; 2]) -> BoundarySegment {
    BoundarySegment {
        tag: tag.to_string(),
        shape: SegmentShape::Line { a, b },
    }
}

fn unit_square() -> DomainPreset {
    let (lo, hi) = ([0.0, 0.0], [1.0, 1.0]);
    DomainPreset {
        name: PresetName::UnitSquare,
        sdf: SignedDistance {
            shape: Sdf::Rectangle { lo, hi },
            bounding_box: [0.0, 0.0, 1.0, 1.0],
        },
        boundary_segments: vec![
            line("gd1", [0.0, 0.0], [0.0, 1.0]),
            line("gd2", [1.0, 0.0], [1.0, 1.0]),
            line("gd3", [0.0, 0.0], [1.0, 0.0]),
            line("gd4", [0.0, 1.0], [1.0, 1.0]),
        ],
        fixed_points: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        curved_arcs: vec![],
    }
}

/// Unit square with a triangular notch cut into the right edge, symmetric
/// about y = 0.5. Tags run counter-clockwise: g4 left, g5 bottom, g6 lower
/// right, g7 lower notch face, g1 upper notch face, g2 upper right, g3 top.
/// This placement keeps the tabulated Dirichlet data continuous around
/// every corner.
fn vnotch(params: &GeometryParams, with_inclusion: bool) -> DomainPreset {
    let m = params.notch_mouth_half_width;
    let d = params.notch_depth;
    let tip = [1.0 - d, 0.5];
    let mouth_lo = [1.0, 0.5 - m];
    let mouth_hi = [1.0, 0.5 + m];
    let vertices = vec![
        [0.0, 0.0],
        [1.0, 0.0],
        mouth_lo,
        tip,
        mouth_hi,
        [1.0, 1.0],
        [0.0, 1.0],
    ];
    let polygon = Sdf::Polygon {
        vertices: vertices.clone(),
    };

    let mut boundary_segments = vec![
        line("g1", tip, mouth_hi),
        line("g2", mouth_hi, [1.0, 1.0]),
        line("g3", [1.0, 1.0], [0.0, 1.0]),
        line("g4", [0.0, 1.0], [0.0, 0.0]),
        line("g5", [0.0, 0.0], [1.0, 0.0]),
        line("g6", [1.0, 0.0], mouth_lo),
        line("g7", mouth_lo, tip),
    ];
    let mut curved_arcs = vec![];

    let (shape, name) = if with_inclusion {
        let arc = CircleArc {
            center: params.inclusion_center,
            radius: params.inclusion_radius,
        };
        boundary_segments.push(BoundarySegment {
            tag: "inc1".to_string(),
            shape: SegmentShape::Arc(arc),
        });
        curved_arcs.push(arc);
        (
            Sdf::Difference(
                Box::new(polygon),
                Box::new(Sdf::Circle {
                    center: arc.center,
                    radius: arc.radius,
                }),
            ),
            PresetName::VNotchWithInclusion,
        )
    } else {
        (polygon, PresetName::VNotch)
    };

    DomainPreset {
        name,
        sdf: SignedDistance {
            shape,
            bounding_box: [0.0, 0.0, 1.0, 1.0],
        },
        boundary_segments,
        fixed_points: vertices,
        curved_arcs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rectangle_examples() {
        assert_eq!(sdf_rectangle([0.5, 0.5], [0.0, 0.0], [1.0, 1.0]), -0.5);
        assert_eq!(sdf_rectangle([0.0, 0.0], [0.0, 0.0], [1.0, 1.0]), 0.0);
        assert_eq!(sdf_rectangle([2.0, 0.5], [0.0, 0.0], [1.0, 1.0]), 1.0);
    }

    #[test]
    fn circle_examples() {
        assert_eq!(sdf_circle([0.2, 0.3], [0.2, 0.3], 0.5), -0.5);
        assert!(sdf_circle([0.7, 0.3], [0.2, 0.3], 0.5).abs() <= 1e-15);
        assert_eq!(sdf_circle([3.0, 0.0], [0.0, 0.0], 1.0), 2.0);
    }

    #[test]
    fn difference_examples() {
        assert_eq!(sdf_difference(-1.0, 1.0), -1.0);
        assert_eq!(sdf_difference(-1.0, -0.2), 0.2);
        assert_eq!(sdf_difference(0.5, -3.0), 3.0);
    }

    #[test]
    fn difference_dominates_first_argument() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            assert!(sdf_difference(a, b) >= a);
        }
    }

    #[test]
    fn unknown_preset_name() {
        assert!(matches!(
            preset_by_name("pentagon"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn preset_shapes() {
        let sq = preset(PresetName::UnitSquare);
        assert_eq!(sq.boundary_segments.len(), 4);
        assert_eq!(sq.sdf.bounding_box, [0.0, 0.0, 1.0, 1.0]);

        let vn = preset(PresetName::VNotch);
        assert_eq!(vn.boundary_segments.len(), 7);
        assert!(vn.curved_arcs.is_empty());

        let vni = preset(PresetName::VNotchWithInclusion);
        assert_eq!(vni.boundary_segments.len(), 8);
        assert_eq!(vni.curved_arcs.len(), 1);
    }

    #[test]
    fn arcs_lie_inside_the_bounding_box() {
        let vni = preset(PresetName::VNotchWithInclusion);
        let [xmin, ymin, xmax, ymax] = vni.sdf.bounding_box;
        for arc in &vni.curved_arcs {
            assert!(arc.center[0] - arc.radius > xmin);
            assert!(arc.center[0] + arc.radius < xmax);
            assert!(arc.center[1] - arc.radius > ymin);
            assert!(arc.center[1] + arc.radius < ymax);
        }
    }

    #[test]
    fn fixed_points_are_on_the_boundary() {
        for name in [
            PresetName::UnitSquare,
            PresetName::VNotch,
            PresetName::VNotchWithInclusion,
        ] {
            let p = preset(name);
            assert!(!p.fixed_points.is_empty());
            for fp in &p.fixed_points {
                assert!(
                    p.sdf.eval(fp[0], fp[1]).abs() < 1e-12,
                    "{} fixed point {:?}",
                    name,
                    fp
                );
            }
        }
    }

    #[test]
    fn at_least_one_interior_point_is_negative() {
        for name in [
            PresetName::UnitSquare,
            PresetName::VNotch,
            PresetName::VNotchWithInclusion,
        ] {
            let p = preset(name);
            assert!(p.sdf.eval(0.1, 0.1) < 0.0);
        }
    }

    #[test]
    fn sdf_is_one_lipschitz() {
        let mut rng = StdRng::seed_from_u64(5);
        for name in [
            PresetName::UnitSquare,
            PresetName::VNotch,
            PresetName::VNotchWithInclusion,
        ] {
            let p = preset(name);
            for _ in 0..5000 {
                let a = [rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5)];
                let b = [rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5)];
                let da = p.sdf.eval(a[0], a[1]);
                let db = p.sdf.eval(b[0], b[1]);
                let dist = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                assert!(
                    (da - db).abs() <= dist + 1e-12,
                    "{}: |{} - {}| > {}",
                    name,
                    da,
                    db,
                    dist
                );
            }
        }
    }

    /// Independent inside test: even-odd ray crossing for the polygon,
    /// radius comparison for the disc.
    fn reference_inside(name: PresetName, p: [f64; 2], params: &GeometryParams) -> bool {
        let m = params.notch_mouth_half_width;
        let d = params.notch_depth;
        let poly: Vec<[f64; 2]> = match name {
            PresetName::UnitSquare => vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            _ => vec![
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 0.5 - m],
                [1.0 - d, 0.5],
                [1.0, 0.5 + m],
                [1.0, 1.0],
                [0.0, 1.0],
            ],
        };
        let mut inside = false;
        let n = poly.len();
        let mut j = n - 1;
        for i in 0..n {
            if (poly[i][1] > p[1]) != (poly[j][1] > p[1]) {
                let x = poly[i][0]
                    + (p[1] - poly[i][1]) / (poly[j][1] - poly[i][1]) * (poly[j][0] - poly[i][0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        if inside && name == PresetName::VNotchWithInclusion {
            let c = params.inclusion_center;
            let r = params.inclusion_radius;
            if (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) < r * r {
                inside = false;
            }
        }
        inside
    }

    #[test]
    fn sign_agrees_with_geometric_classification() {
        let params = GeometryParams::default();
        let mut rng = StdRng::seed_from_u64(9);
        for name in [
            PresetName::UnitSquare,
            PresetName::VNotch,
            PresetName::VNotchWithInclusion,
        ] {
            let p = preset(name);
            for _ in 0..10_000 {
                let q = [rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2)];
                let d = p.sdf.eval(q[0], q[1]);
                if d.abs() < 1e-9 {
                    continue; // sampling exactly on the boundary is ambiguous
                }
                assert_eq!(
                    d < 0.0,
                    reference_inside(name, q, &params),
                    "{}: point {:?} distance {}",
                    name,
                    q,
                    d
                );
            }
        }
    }

    #[test]
    fn boundary_samples_classify_into_exactly_one_tag() {
        for name in [
            PresetName::UnitSquare,
            PresetName::VNotch,
            PresetName::VNotchWithInclusion,
        ] {
            let p = preset(name);
            let tags: Vec<&str> = p.boundary_segments.iter().map(|s| s.tag.as_str()).collect();
            let mut unique = tags.clone();
            unique.sort_unstable();
            unique.dedup();
            assert_eq!(unique.len(), tags.len(), "{}: duplicate tags", name);

            for seg in &p.boundary_segments {
                for k in 1..40 {
                    let t = k as f64 / 40.0;
                    let q = seg.shape.point_at(t);
                    // every sampled boundary point is on the zero level set
                    assert!(p.sdf.eval(q[0], q[1]).abs() <= 1e-12);
                    let hits: Vec<&str> = p
                        .boundary_segments
                        .iter()
                        .filter(|s| s.shape.distance(q) <= 1e-9)
                        .map(|s| s.tag.as_str())
                        .collect();
                    // interior samples of a piece belong to that piece alone
                    if hits.len() != 1 {
                        // segment endpoints shared with a neighbour are the
                        // only admissible multi-hits and are excluded by the
                        // strict sampling above
                        panic!("{}: point {:?} hit {:?}", name, q, hits);
                    }
                    assert_eq!(hits[0], seg.tag);
                }
            }
        }
    }
}
