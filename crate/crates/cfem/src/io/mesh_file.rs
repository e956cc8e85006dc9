//! Plain-text cubic mesh format.
//!
//! ```text
//! cfem-mesh v1
//! nodes <N> elements <E>
//! <id> <x> <y> <tag|->          N lines
//! <id> <n1> .. <n10> curved:<edge|-> arc:<arc|->   E lines
//! arc <id> <cx> <cy> <r>        one line per inclusion arc
//! ```
//!
//! Coordinates carry 17 significant digits so a write/read round trip
//! reproduces the mesh bit for bit; rewriting a read mesh reproduces the
//! file byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::fmt_f64;
use crate::error::{Error, Result};
use crate::geometry::CircleArc;
use crate::meshgen::{CubicElement, CubicMesh, CurvedEdge, Node};

pub fn write_mesh(mesh: &CubicMesh, path: &Path) -> Result<()> {
    std::fs::write(path, render_mesh(mesh))?;
    Ok(())
}

pub fn render_mesh(mesh: &CubicMesh) -> String {
    let mut out = String::new();
    out.push_str("cfem-mesh v1\n");
    let _ = writeln!(
        out,
        "nodes {} elements {}",
        mesh.nodes.len(),
        mesh.elements.len()
    );
    for (id, node) in mesh.nodes.iter().enumerate() {
        let tag = node.tag.as_deref().unwrap_or("-");
        let _ = writeln!(out, "{id} {} {} {tag}", fmt_f64(node.x), fmt_f64(node.y));
    }
    for (id, el) in mesh.elements.iter().enumerate() {
        let _ = write!(out, "{id}");
        for n in el.nodes {
            let _ = write!(out, " {n}");
        }
        match el.curved {
            Some(c) => {
                let _ = writeln!(out, " curved:{} arc:{}", c.local_edge, c.arc);
            }
            None => {
                let _ = writeln!(out, " curved:- arc:-");
            }
        }
    }
    for (id, arc) in mesh.arcs.iter().enumerate() {
        let _ = writeln!(
            out,
            "arc {id} {} {} {}",
            fmt_f64(arc.center[0]),
            fmt_f64(arc.center[1]),
            fmt_f64(arc.radius)
        );
    }
    out
}

pub fn read_mesh(path: &Path) -> Result<CubicMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, &path.display().to_string())
}

pub fn parse_mesh(text: &str, path: &str) -> Result<CubicMesh> {
    let err = |line: usize, message: String| Error::MeshParse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();

    let (ln, header) = lines
        .next()
        .ok_or_else(|| err(1, "empty file".to_string()))?;
    if header.trim() != "cfem-mesh v1" {
        return Err(err(ln + 1, format!("bad header `{header}`")));
    }

    let (ln, counts) = lines
        .next()
        .ok_or_else(|| err(2, "missing counts line".to_string()))?;
    let parts: Vec<&str> = counts.split_whitespace().collect();
    let (n_nodes, n_elements) = match parts.as_slice() {
        ["nodes", n, "elements", e] => (
            n.parse::<usize>()
                .map_err(|_| err(ln + 1, format!("bad node count `{n}`")))?,
            e.parse::<usize>()
                .map_err(|_| err(ln + 1, format!("bad element count `{e}`")))?,
        ),
        _ => return Err(err(ln + 1, format!("bad counts line `{counts}`"))),
    };

    let mut nodes = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(2 + i, format!("expected {n_nodes} node lines")))?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 4 {
            return Err(err(ln + 1, format!("node line needs 4 fields, got {}", p.len())));
        }
        let id: usize = p[0]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad node id `{}`", p[0])))?;
        if id != i {
            return Err(err(ln + 1, format!("node id {id} out of order (expected {i})")));
        }
        let x: f64 = p[1]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad x `{}`", p[1])))?;
        let y: f64 = p[2]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad y `{}`", p[2])))?;
        let tag = if p[3] == "-" { None } else { Some(p[3].to_string()) };
        nodes.push(Node { x, y, tag });
    }

    let mut elements = Vec::with_capacity(n_elements);
    let mut max_arc_ref = None::<usize>;
    for i in 0..n_elements {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| err(2 + n_nodes + i, format!("expected {n_elements} element lines")))?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 13 {
            return Err(err(
                ln + 1,
                format!("element line needs 13 fields (id, 10 nodes, curved, arc), got {}", p.len()),
            ));
        }
        let id: usize = p[0]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad element id `{}`", p[0])))?;
        if id != i {
            return Err(err(ln + 1, format!("element id {id} out of order (expected {i})")));
        }
        let mut ids = [0usize; 10];
        for (k, slot) in ids.iter_mut().enumerate() {
            let n: usize = p[1 + k]
                .parse()
                .map_err(|_| err(ln + 1, format!("bad node reference `{}`", p[1 + k])))?;
            if n >= n_nodes {
                return Err(err(ln + 1, format!("node reference {n} out of range")));
            }
            *slot = n;
        }
        let curved_field = p[11]
            .strip_prefix("curved:")
            .ok_or_else(|| err(ln + 1, format!("expected curved:<edge|->, got `{}`", p[11])))?;
        let arc_field = p[12]
            .strip_prefix("arc:")
            .ok_or_else(|| err(ln + 1, format!("expected arc:<id|->, got `{}`", p[12])))?;
        let curved = match (curved_field, arc_field) {
            ("-", "-") => None,
            ("1", a) => {
                let arc: usize = a
                    .parse()
                    .map_err(|_| err(ln + 1, format!("bad arc reference `{a}`")))?;
                max_arc_ref = Some(max_arc_ref.map_or(arc, |m: usize| m.max(arc)));
                Some(CurvedEdge { local_edge: 1, arc })
            }
            (e, _) => {
                return Err(err(
                    ln + 1,
                    format!("unsupported curved edge `{e}` (only edge 1 may curve)"),
                ))
            }
        };
        elements.push(CubicElement { nodes: ids, curved });
    }

    let mut arcs = Vec::new();
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 5 || p[0] != "arc" {
            return Err(err(ln + 1, format!("bad arc line `{line}`")));
        }
        let id: usize = p[1]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad arc id `{}`", p[1])))?;
        if id != arcs.len() {
            return Err(err(ln + 1, format!("arc id {id} out of order")));
        }
        let cx: f64 = p[2]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad arc cx `{}`", p[2])))?;
        let cy: f64 = p[3]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad arc cy `{}`", p[3])))?;
        let r: f64 = p[4]
            .parse()
            .map_err(|_| err(ln + 1, format!("bad arc radius `{}`", p[4])))?;
        arcs.push(CircleArc {
            center: [cx, cy],
            radius: r,
        });
    }

    if let Some(m) = max_arc_ref {
        if m >= arcs.len() {
            return Err(err(0, format!("element references arc {m} but only {} arcs are defined", arcs.len())));
        }
    }

    // Vertex and unique-edge counts are derived, not stored.
    let mut vertex_ids = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for el in &elements {
        let [v1, v2, v3] = [el.nodes[0], el.nodes[1], el.nodes[2]];
        vertex_ids.extend([v1, v2, v3]);
        for (a, b) in [(v1, v2), (v2, v3), (v3, v1)] {
            edges.insert((a.min(b), a.max(b)));
        }
    }

    Ok(CubicMesh {
        nodes,
        elements,
        arcs,
        vertex_count: vertex_ids.len(),
        edge_count: edges.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset, PresetName};
    use crate::meshgen::{enrich_to_cubic, structured_square_mesh};

    fn square_mesh() -> CubicMesh {
        enrich_to_cubic(&structured_square_mesh(2), &preset(PresetName::UnitSquare)).unwrap()
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let mesh = square_mesh();
        let text = render_mesh(&mesh);
        let back = parse_mesh(&text, "mem").unwrap();
        assert_eq!(back, mesh);
        assert_eq!(render_mesh(&back), text);
    }

    #[test]
    fn eight_element_square_has_49_node_lines() {
        let text = render_mesh(&square_mesh());
        assert!(text.starts_with("cfem-mesh v1\nnodes 49 elements 8\n"));
        let node_lines = text
            .lines()
            .skip(2)
            .take(49)
            .filter(|l| l.split_whitespace().count() == 4)
            .count();
        assert_eq!(node_lines, 49);
    }

    #[test]
    fn malformed_element_line_names_its_line() {
        let mesh = square_mesh();
        let mut text = render_mesh(&mesh);
        // chop one node id off the first element line (line 2 + 49 + 1)
        let lines: Vec<&str> = text.lines().collect();
        let bad_line = 2 + 49;
        let mut broken: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
        let fields: Vec<&str> = lines[bad_line].split_whitespace().collect();
        broken[bad_line] = fields[..10].join(" ") + " curved:- arc:-";
        text = broken.join("\n");
        match parse_mesh(&text, "mem") {
            Err(Error::MeshParse { line, .. }) => assert_eq!(line, bad_line + 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn dangling_arc_reference_is_rejected() {
        let mut mesh = square_mesh();
        mesh.elements[0].curved = Some(CurvedEdge { local_edge: 1, arc: 3 });
        let text = render_mesh(&mesh);
        assert!(parse_mesh(&text, "mem").is_err());
    }
}
