//! Field export for external contour plotting.
//!
//! CSV lists one `x,y,value` row per node. VTK writes a legacy ASCII
//! unstructured grid in which every cubic triangle is subdivided into nine
//! linear sub-triangles (the interior node becomes a vertex of the central
//! ones), so any viewer can render the interior field structure.

use std::path::Path;
use std::str::FromStr;

use super::fmt_f64;
use crate::error::{Error, Result};
use crate::meshgen::CubicMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Vtk,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "vtk" => Ok(ExportFormat::Vtk),
            other => Err(Error::ExportFormat(other.to_string())),
        }
    }
}

/// Local-index subdivision of the ten-node triangle into nine linear ones.
const SUBDIVISION: [[usize; 3]; 9] = [
    [2, 7, 6],
    [7, 8, 9],
    [8, 0, 3],
    [7, 9, 6],
    [8, 3, 9],
    [6, 9, 5],
    [9, 3, 4],
    [9, 4, 5],
    [5, 4, 1],
];

pub fn export_field(
    mesh: &CubicMesh,
    field: &[f64],
    format: ExportFormat,
    name: &str,
    path: &Path,
) -> Result<()> {
    assert_eq!(field.len(), mesh.dof_count(), "field size != dof count");
    let text = match format {
        ExportFormat::Csv => render_csv(mesh, field),
        ExportFormat::Vtk => render_vtk(mesh, field, name),
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn render_csv(mesh: &CubicMesh, field: &[f64]) -> String {
    let mut out = String::from("x,y,value\n");
    for (node, v) in mesh.nodes.iter().zip(field) {
        out.push_str(&fmt_f64(node.x));
        out.push(',');
        out.push_str(&fmt_f64(node.y));
        out.push(',');
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

fn render_vtk(mesh: &CubicMesh, field: &[f64], name: &str) -> String {
    let n = mesh.nodes.len();
    let cells = 9 * mesh.elements.len();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("cfem field export\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {n} double\n"));
    for node in &mesh.nodes {
        out.push_str(&format!("{} {} 0\n", fmt_f64(node.x), fmt_f64(node.y)));
    }
    out.push_str(&format!("CELLS {cells} {}\n", 4 * cells));
    for el in &mesh.elements {
        for tri in SUBDIVISION {
            out.push_str(&format!(
                "3 {} {} {}\n",
                el.nodes[tri[0]], el.nodes[tri[1]], el.nodes[tri[2]]
            ));
        }
    }
    out.push_str(&format!("CELL_TYPES {cells}\n"));
    for _ in 0..cells {
        out.push_str("5\n");
    }
    out.push_str(&format!("POINT_DATA {n}\n"));
    out.push_str(&format!("SCALARS {name} double 1\n"));
    out.push_str("LOOKUP_TABLE default\n");
    for v in field {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

/// Reads a field back from its CSV export, in node order.
pub fn read_field_csv(path: &Path, mesh: &CubicMesh) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let mut values = Vec::with_capacity(mesh.dof_count());
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != "x,y,value" {
                return Err(Error::MeshParse {
                    path: name,
                    line: 1,
                    message: format!("bad csv header `{line}`"),
                });
            }
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::MeshParse {
                path: name,
                line: i + 1,
                message: format!("expected x,y,value got `{line}`"),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::MeshParse {
                path: path.display().to_string(),
                line: i + 1,
                message: format!("bad number `{s}`"),
            })
        };
        let (x, y, v) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        let id = values.len();
        if id >= mesh.dof_count() {
            return Err(Error::MeshParse {
                path: name,
                line: i + 1,
                message: "more rows than mesh nodes".to_string(),
            });
        }
        let node = &mesh.nodes[id];
        if (node.x - x).abs() > 1e-9 || (node.y - y).abs() > 1e-9 {
            return Err(Error::MeshParse {
                path: name,
                line: i + 1,
                message: format!("row coordinates ({x}, {y}) do not match node {id}"),
            });
        }
        values.push(v);
    }
    if values.len() != mesh.dof_count() {
        return Err(Error::MeshParse {
            path: path.display().to_string(),
            line: 0,
            message: format!("{} rows for {} nodes", values.len(), mesh.dof_count()),
        });
    }
    Ok(values)
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
    fn csv_row_count_is_dof_plus_header() {
        let mesh = square_mesh();
        let field = vec![0.0; mesh.dof_count()];
        let text = render_csv(&mesh, &field);
        assert_eq!(text.lines().count(), mesh.dof_count() + 1);
        for line in text.lines().skip(1) {
            assert!(line.ends_with(",0.0000000000000000e0"));
        }
    }

    #[test]
    fn vtk_cell_count_is_nine_per_element() {
        let mesh = square_mesh();
        let field: Vec<f64> = (0..mesh.dof_count()).map(|i| i as f64).collect();
        let text = render_vtk(&mesh, &field, "w");
        assert!(text.contains(&format!("CELLS {} {}", 9 * 8, 4 * 9 * 8)));
        let count = text.lines().filter(|l| *l == "5").count();
        assert_eq!(count, 72);
    }

    #[test]
    fn exports_are_deterministic() {
        let mesh = square_mesh();
        let field: Vec<f64> = (0..mesh.dof_count()).map(|i| (i as f64).sin()).collect();
        assert_eq!(render_csv(&mesh, &field), render_csv(&mesh, &field));
        assert_eq!(render_vtk(&mesh, &field, "w"), render_vtk(&mesh, &field, "w"));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = square_mesh();
        let field: Vec<f64> = (0..mesh.dof_count()).map(|i| (i as f64) * 0.7 - 3.0).collect();
        let path = dir.path().join("w.csv");
        export_field(&mesh, &field, ExportFormat::Csv, "w", &path).unwrap();
        let back = read_field_csv(&path, &mesh).unwrap();
        assert_eq!(back, field);
    }
}
