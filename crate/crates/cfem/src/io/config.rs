//! Run configuration: a TOML document with `geometry`, `mesh`, `material`,
//! `solver` and `output` sections. Unknown keys are rejected; physical
//! parameters are validated for positivity on load.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::assembly::ProblemSpec;
use crate::constitutive::StrainLimitParams;
use crate::error::{Error, Result};
use crate::geometry::{preset_with, DomainPreset, GeometryParams, PresetName};
use crate::io::ExportFormat;
use crate::meshgen::MesherParams;
use crate::solver::{ConvergenceMetric, LinearSolverKind, PicardConfig};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub material: MaterialSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    pub preset: String,
    pub notch_mouth_half_width: Option<f64>,
    pub notch_depth: Option<f64>,
    pub inclusion_center: Option<[f64; 2]>,
    pub inclusion_radius: Option<f64>,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            preset: "unit_square".to_string(),
            notch_mouth_half_width: None,
            notch_depth: None,
            inclusion_center: None,
            inclusion_radius: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    /// Target edge length of the iterative mesher.
    pub h0: Option<f64>,
    /// Structured grid mode (unit square only).
    pub structured: Option<bool>,
    /// Cells per side in structured mode.
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mesh_iters")]
    pub max_iters: usize,
    /// Grid jitter amplitude as a fraction of h0.
    #[serde(default = "default_jitter")]
    pub jitter: f64,
}

fn default_cells() -> usize {
    2
}

fn default_mesh_iters() -> usize {
    5000
}

fn default_jitter() -> f64 {
    0.05
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            h0: None,
            structured: None,
            cells: default_cells(),
            seed: 0,
            max_iters: default_mesh_iters(),
            jitter: default_jitter(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    #[serde(default = "default_one")]
    pub kappa: f64,
    #[serde(default = "default_one")]
    pub xi: f64,
    #[serde(default = "default_one")]
    pub alpha: f64,
    #[serde(default = "default_one")]
    pub beta: f64,
}

fn default_one() -> f64 {
    1.0
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            xi: 1.0,
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_solver_iters")]
    pub max_iters: usize,
    #[serde(default = "default_metric")]
    pub metric: String,
    #[serde(default = "default_linear")]
    pub linear: String,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_quad_degree")]
    pub quad_degree: usize,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_solver_iters() -> usize {
    50
}

fn default_metric() -> String {
    "max_abs".to_string()
}

fn default_linear() -> String {
    "direct".to_string()
}

fn default_damping() -> f64 {
    0.5
}

fn default_quad_degree() -> usize {
    8
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iters: default_solver_iters(),
            metric: default_metric(),
            linear: default_linear(),
            damping: default_damping(),
            quad_degree: default_quad_degree(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string()]
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.preset_name()?;
        if !(self.material.kappa > 0.0) {
            return Err(Error::Config("material.kappa must be positive".into()));
        }
        if !(self.material.xi > 0.0) {
            return Err(Error::Config("material.xi must be positive".into()));
        }
        if !(self.material.alpha > 0.0) {
            return Err(Error::Config("material.alpha must be positive".into()));
        }
        if !(self.material.beta >= 0.0) {
            return Err(Error::Config("material.beta must be non-negative".into()));
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::Config("solver.tol must be positive".into()));
        }
        if self.solver.max_iters == 0 {
            return Err(Error::Config("solver.max_iters must be at least 1".into()));
        }
        if !(self.solver.damping > 0.0 && self.solver.damping <= 1.0) {
            return Err(Error::Config("solver.damping must lie in (0, 1]".into()));
        }
        if let Some(h0) = self.mesh.h0 {
            if !(h0 > 0.0) {
                return Err(Error::Config("mesh.h0 must be positive".into()));
            }
        }
        if self.mesh.cells == 0 {
            return Err(Error::Config("mesh.cells must be at least 1".into()));
        }
        self.metric()?;
        self.linear_solver()?;
        for f in &self.output.formats {
            f.parse::<ExportFormat>()?;
        }
        if self.structured() && self.preset_name()? != PresetName::UnitSquare {
            return Err(Error::Config(
                "mesh.structured applies to the unit_square preset only".into(),
            ));
        }
        Ok(())
    }

    pub fn preset_name(&self) -> Result<PresetName> {
        self.geometry.preset.parse()
    }

    pub fn geometry_params(&self) -> GeometryParams {
        let mut p = GeometryParams::default();
        if let Some(v) = self.geometry.notch_mouth_half_width {
            p.notch_mouth_half_width = v;
        }
        if let Some(v) = self.geometry.notch_depth {
            p.notch_depth = v;
        }
        if let Some(v) = self.geometry.inclusion_center {
            p.inclusion_center = v;
        }
        if let Some(v) = self.geometry.inclusion_radius {
            p.inclusion_radius = v;
        }
        p
    }

    pub fn domain(&self) -> Result<DomainPreset> {
        Ok(preset_with(self.preset_name()?, &self.geometry_params()))
    }

    /// Structured-grid mode; defaults to on for the unit square.
    pub fn structured(&self) -> bool {
        self.mesh
            .structured
            .unwrap_or(matches!(self.preset_name(), Ok(PresetName::UnitSquare)))
    }

    /// Mesh spacing; the presets default to their benchmark values.
    pub fn h0(&self) -> f64 {
        self.mesh.h0.unwrap_or(match self.preset_name() {
            Ok(PresetName::VNotch) => 0.045,
            Ok(PresetName::VNotchWithInclusion) => 0.044,
            _ => 0.05,
        })
    }

    pub fn mesher_params(&self) -> MesherParams {
        MesherParams {
            h0: self.h0(),
            max_iters: self.mesh.max_iters,
            seed: self.mesh.seed,
            jitter: self.mesh.jitter,
        }
    }

    pub fn strain_params(&self) -> Result<StrainLimitParams> {
        StrainLimitParams::new(self.material.alpha, self.material.beta)
    }

    /// Problem specification matching the configured preset's boundary
    /// tables.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        let strain = self.strain_params()?;
        match self.preset_name()? {
            PresetName::UnitSquare => {
                ProblemSpec::square_preset(self.material.kappa, self.material.xi, strain)
            }
            PresetName::VNotch | PresetName::VNotchWithInclusion => {
                ProblemSpec::vnotch_preset(self.material.kappa, self.material.xi, strain)
            }
        }
    }

    pub fn metric(&self) -> Result<ConvergenceMetric> {
        match self.solver.metric.as_str() {
            "max_abs" => Ok(ConvergenceMetric::MaxAbs),
            "relative" => Ok(ConvergenceMetric::Relative),
            other => Err(Error::Config(format!(
                "solver.metric must be max_abs or relative, got `{other}`"
            ))),
        }
    }

    pub fn linear_solver(&self) -> Result<LinearSolverKind> {
        match self.solver.linear.as_str() {
            "direct" => Ok(LinearSolverKind::Direct),
            "cg" => Ok(LinearSolverKind::Cg),
            other => Err(Error::Config(format!(
                "solver.linear must be direct or cg, got `{other}`"
            ))),
        }
    }

    pub fn picard_config(&self) -> Result<PicardConfig> {
        Ok(PicardConfig {
            tol: self.solver.tol,
            max_iters: self.solver.max_iters,
            metric: self.metric()?,
            damping: self.solver.damping,
            linear: self.linear_solver()?,
            quad_degree: self.solver.quad_degree,
        })
    }

    pub fn export_formats(&self) -> Result<Vec<ExportFormat>> {
        self.output.formats.iter().map(|f| f.parse()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.preset_name().unwrap(), PresetName::UnitSquare);
        assert!(cfg.structured());
        assert_eq!(cfg.mesh.cells, 2);
        assert_eq!(cfg.solver.quad_degree, 8);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::parse("[solver]\nspeed = 9\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = RunConfig::parse("[turbo]\non = true\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn physical_parameters_are_validated() {
        assert!(RunConfig::parse("[material]\nkappa = 0.0\n").is_err());
        assert!(RunConfig::parse("[material]\nkappa = -2.0\n").is_err());
        assert!(RunConfig::parse("[material]\nxi = -1.0\n").is_err());
        assert!(RunConfig::parse("[material]\nalpha = 0.0\n").is_err());
        assert!(RunConfig::parse("[material]\nbeta = -0.5\n").is_err());
        assert!(RunConfig::parse("[solver]\ndamping = 0.0\n").is_err());
        assert!(RunConfig::parse("[solver]\nmetric = \"foo\"\n").is_err());
        assert!(RunConfig::parse("[output]\nformats = [\"png\"]\n").is_err());
    }

    #[test]
    fn preset_defaults() {
        let cfg = RunConfig::parse("[geometry]\npreset = \"vnotch\"\n").unwrap();
        assert!(!cfg.structured());
        assert!((cfg.h0() - 0.045).abs() < 1e-15);
        let cfg = RunConfig::parse("[geometry]\npreset = \"vnotch_with_inclusion\"\n").unwrap();
        assert!((cfg.h0() - 0.044).abs() < 1e-15);
    }

    #[test]
    fn structured_vnotch_is_rejected() {
        let err = RunConfig::parse("[geometry]\npreset = \"vnotch\"\n[mesh]\nstructured = true\n");
        assert!(err.is_err());
    }
}
