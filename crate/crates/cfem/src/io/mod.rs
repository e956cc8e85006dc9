//! File formats and run configuration: the text mesh format, CSV/VTK field
//! export and the TOML configuration document.

pub mod config;
pub mod export;
pub mod mesh_file;

pub use config::RunConfig;
pub use export::{export_field, read_field_csv, ExportFormat};
pub use mesh_file::{read_mesh, write_mesh};

/// Formats a coordinate with 17 significant digits, enough to reproduce the
/// exact binary value on read-back.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
