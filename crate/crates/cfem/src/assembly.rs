//! Global assembly of the two weak forms: the linear diffusion form for the
//! temperature and the Picard-frozen quasilinear form for the displacement,
//! plus the thermo-mechanical coupling right-hand side and symmetric
//! Dirichlet elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::constitutive::{anti_plane_strain, bounded_phi, StrainLimitParams};
use crate::element::{shape_values, ElementGeometry, QuadratureRule, NODE_COUNT};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::meshgen::CubicMesh;

/// Closed-form Dirichlet data attached to a boundary tag.
#[derive(Clone)]
pub enum BoundaryData {
    Constant(f64),
    /// 1 - x
    OneMinusX,
    /// x (1 - x)
    XTimesOneMinusX,
    /// sin(1) sin(y)
    SinOneSinY,
    /// sin(1) sin(x)
    SinOneSinX,
    /// a + b x + c y
    Linear { a: f64, b: f64, c: f64 },
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl BoundaryData {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            BoundaryData::Constant(v) => *v,
            BoundaryData::OneMinusX => 1.0 - x,
            BoundaryData::XTimesOneMinusX => x * (1.0 - x),
            BoundaryData::SinOneSinY => 1f64.sin() * y.sin(),
            BoundaryData::SinOneSinX => 1f64.sin() * x.sin(),
            BoundaryData::Linear { a, b, c } => a + b * x + c * y,
            BoundaryData::Custom(f) => f(x, y),
        }
    }
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryData::Constant(v) => write!(f, "Constant({v})"),
            BoundaryData::OneMinusX => write!(f, "OneMinusX"),
            BoundaryData::XTimesOneMinusX => write!(f, "XTimesOneMinusX"),
            BoundaryData::SinOneSinY => write!(f, "SinOneSinY"),
            BoundaryData::SinOneSinX => write!(f, "SinOneSinX"),
            BoundaryData::Linear { a, b, c } => write!(f, "Linear({a}, {b}, {c})"),
            BoundaryData::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

pub type SourceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Argument fed to the quasilinear coefficient at each quadrature point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiArgument {
    /// Frobenius norm of the anti-plane strain, |grad w| / sqrt(2).
    StrainNorm,
    /// Plain gradient norm |grad w|, used by the manufactured benchmark.
    GradientNorm,
}

/// Which of the two fields a boundary table refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Theta,
    W,
}

/// Coefficients, sources and Dirichlet tables of one boundary value problem.
#[derive(Clone)]
pub struct ProblemSpec {
    /// Thermal conductivity; strictly positive.
    pub kappa: f64,
    /// Thermo-mechanical coupling constant.
    pub xi: f64,
    pub strain: StrainLimitParams,
    pub phi_argument: PhiArgument,
    /// Source of the temperature equation; `None` means zero.
    pub theta_source: Option<SourceFn>,
    /// Extra source of the displacement equation (manufactured runs).
    pub w_source: Option<SourceFn>,
    pub theta_bc: BTreeMap<String, BoundaryData>,
    pub w_bc: BTreeMap<String, BoundaryData>,
    /// Tags with natural (do-nothing) conditions: inclusion arcs.
    pub flux_free: BTreeSet<String>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("kappa", &self.kappa)
            .field("xi", &self.xi)
            .field("strain", &self.strain)
            .field("phi_argument", &self.phi_argument)
            .field("theta_source", &self.theta_source.is_some())
            .field("w_source", &self.w_source.is_some())
            .field("theta_bc", &self.theta_bc)
            .field("w_bc", &self.w_bc)
            .field("flux_free", &self.flux_free)
            .finish()
    }
}

impl ProblemSpec {
    pub fn new(kappa: f64, xi: f64, strain: StrainLimitParams) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Config(format!(
                "thermal conductivity must be strictly positive, got {kappa}"
            )));
        }
        if !xi.is_finite() {
            return Err(Error::Config(format!("coupling constant must be finite, got {xi}")));
        }
        Ok(Self {
            kappa,
            xi,
            strain,
            phi_argument: PhiArgument::StrainNorm,
            theta_source: None,
            w_source: None,
            theta_bc: BTreeMap::new(),
            w_bc: BTreeMap::new(),
            flux_free: BTreeSet::new(),
        })
    }

    /// Boundary tables of the square benchmark.
    pub fn square_preset(kappa: f64, xi: f64, strain: StrainLimitParams) -> Result<Self> {
        let mut spec = Self::new(kappa, xi, strain)?;
        for (tag, theta, w) in [
            ("gd1", BoundaryData::Constant(0.0), BoundaryData::Constant(1.0)),
            ("gd2", BoundaryData::Constant(0.0), BoundaryData::Constant(0.0)),
            ("gd3", BoundaryData::XTimesOneMinusX, BoundaryData::OneMinusX),
            ("gd4", BoundaryData::Constant(0.0), BoundaryData::OneMinusX),
        ] {
            spec.theta_bc.insert(tag.to_string(), theta);
            spec.w_bc.insert(tag.to_string(), w);
        }
        Ok(spec)
    }

    /// Boundary tables of the V-notch benchmarks (with or without the
    /// inclusion; the arc is traction- and flux-free).
    pub fn vnotch_preset(kappa: f64, xi: f64, strain: StrainLimitParams) -> Result<Self> {
        let mut spec = Self::new(kappa, xi, strain)?;
        let zero = || BoundaryData::Constant(0.0);
        for (tag, theta, w) in [
            ("g1", zero(), zero()),
            ("g2", zero(), zero()),
            ("g3", zero(), BoundaryData::OneMinusX),
            ("g4", zero(), BoundaryData::Constant(1.0)),
            ("g5", BoundaryData::XTimesOneMinusX, BoundaryData::OneMinusX),
            ("g6", zero(), zero()),
            ("g7", zero(), zero()),
        ] {
            spec.theta_bc.insert(tag.to_string(), theta);
            spec.w_bc.insert(tag.to_string(), w);
        }
        spec.flux_free.insert("inc1".to_string());
        Ok(spec)
    }

    /// Evaluates the Dirichlet table of `field` at a boundary point.
    pub fn evaluate_bc(&self, field: Field, tag: &str, x: f64, y: f64) -> Result<f64> {
        let table = match field {
            Field::Theta => &self.theta_bc,
            Field::W => &self.w_bc,
        };
        table
            .get(tag)
            .map(|d| d.eval(x, y))
            .ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    /// Checks that every tag occurring in the mesh carries data for both
    /// fields or is explicitly flux-free.
    pub fn validate_against(&self, mesh: &CubicMesh) -> Result<()> {
        let mut tags: BTreeSet<&str> = BTreeSet::new();
        for node in &mesh.nodes {
            if let Some(t) = &node.tag {
                tags.insert(t);
            }
        }
        for tag in tags {
            if self.flux_free.contains(tag) {
                continue;
            }
            if !self.theta_bc.contains_key(tag) {
                return Err(Error::MissingBoundaryData {
                    tag: tag.to_string(),
                    field: "theta",
                });
            }
            if !self.w_bc.contains_key(tag) {
                return Err(Error::MissingBoundaryData {
                    tag: tag.to_string(),
                    field: "w",
                });
            }
        }
        Ok(())
    }
}

/// Symmetric sparse system with its right-hand side and any constraints
/// already eliminated into it.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constrained: Vec<(usize, f64)>,
}

/// Stiffness of one element with a per-quadrature-point scalar weight.
pub fn element_stiffness(
    geom: &ElementGeometry,
    quad: &QuadratureRule,
    mut weight: impl FnMut(f64, f64) -> Result<f64>,
) -> Result<[[f64; NODE_COUNT]; NODE_COUNT]> {
    let mut k = [[0.0; NODE_COUNT]; NODE_COUNT];
    for (p, wq) in quad.iter() {
        let (_, det) = geom.jacobian(p[0], p[1])?;
        let grads = geom.physical_gradients(p[0], p[1])?;
        let xy = geom.map_point(p[0], p[1]);
        let c = weight(xy[0], xy[1])? * wq * det;
        for i in 0..NODE_COUNT {
            for j in i..NODE_COUNT {
                let v = c * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                k[i][j] += v;
                if i != j {
                    k[j][i] += v;
                }
            }
        }
    }
    Ok(k)
}

/// Mass matrix of one element.
pub fn element_mass(
    geom: &ElementGeometry,
    quad: &QuadratureRule,
) -> Result<[[f64; NODE_COUNT]; NODE_COUNT]> {
    let mut m = [[0.0; NODE_COUNT]; NODE_COUNT];
    for (p, wq) in quad.iter() {
        let (_, det) = geom.jacobian(p[0], p[1])?;
        let n = shape_values(p[0], p[1]);
        let c = wq * det;
        for i in 0..NODE_COUNT {
            for j in i..NODE_COUNT {
                let v = c * n[i] * n[j];
                m[i][j] += v;
                if i != j {
                    m[j][i] += v;
                }
            }
        }
    }
    Ok(m)
}

/// Load vector of one element for a pointwise source.
pub fn element_load(
    geom: &ElementGeometry,
    quad: &QuadratureRule,
    f: impl Fn(f64, f64) -> f64,
) -> Result<[f64; NODE_COUNT]> {
    let mut l = [0.0; NODE_COUNT];
    for (p, wq) in quad.iter() {
        let (_, det) = geom.jacobian(p[0], p[1])?;
        let n = shape_values(p[0], p[1]);
        let xy = geom.map_point(p[0], p[1]);
        let c = wq * det * f(xy[0], xy[1]);
        for i in 0..NODE_COUNT {
            l[i] += c * n[i];
        }
    }
    Ok(l)
}

fn scatter(
    triplets: &mut Vec<(usize, usize, f64)>,
    ids: &[usize; NODE_COUNT],
    k: &[[f64; NODE_COUNT]; NODE_COUNT],
) {
    for i in 0..NODE_COUNT {
        for j in 0..NODE_COUNT {
            triplets.push((ids[i], ids[j], k[i][j]));
        }
    }
}

/// Assembles the diffusion form `sum_K int kappa grad(theta) . grad(phi)`
/// with the configured temperature source on the right-hand side.
pub fn assemble_diffusion(
    mesh: &CubicMesh,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<SparseSystem> {
    let n = mesh.dof_count();
    let mut triplets = Vec::with_capacity(mesh.elements.len() * NODE_COUNT * NODE_COUNT);
    let mut rhs = vec![0.0; n];
    for (e, el) in mesh.elements.iter().enumerate() {
        let geom = mesh.element_geometry(e);
        let k = element_stiffness(&geom, quad, |_, _| Ok(spec.kappa))?;
        scatter(&mut triplets, &el.nodes, &k);
        if let Some(g) = &spec.theta_source {
            let l = element_load(&geom, quad, |x, y| g(x, y))?;
            for (i, &id) in el.nodes.iter().enumerate() {
                rhs[id] += l[i];
            }
        }
    }
    Ok(SparseSystem {
        matrix: CsrMatrix::from_triplets(n, &triplets),
        rhs,
        constrained: Vec::new(),
    })
}

/// Largest `beta * |anti-plane strain|` of the field over all quadrature
/// points; the field is admissible while this stays below one.
pub fn strain_limit_measure(
    mesh: &CubicMesh,
    w: &[f64],
    strain: &StrainLimitParams,
    quad: &QuadratureRule,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (e, el) in mesh.elements.iter().enumerate() {
        let geom = mesh.element_geometry(e);
        let mut nodal = [0.0; NODE_COUNT];
        for (slot, &id) in nodal.iter_mut().zip(el.nodes.iter()) {
            *slot = w[id];
        }
        for (p, _) in quad.iter() {
            let grads = geom.physical_gradients(p[0], p[1])?;
            let mut g = [0.0, 0.0];
            for i in 0..NODE_COUNT {
                g[0] += grads[i][0] * nodal[i];
                g[1] += grads[i][1] * nodal[i];
            }
            worst = worst.max(strain.beta * anti_plane_strain(g).norm);
        }
    }
    Ok(worst)
}

/// Assembles the Picard-frozen quasilinear form: the diffusion kernel
/// weighted by the coefficient evaluated at the previous iterate, with the
/// coupling term (and any manufactured source) on the right-hand side.
///
/// Fails with a located strain-limit error if the frozen iterate leaves the
/// admissible set at any quadrature point.
pub fn assemble_quasilinear(
    mesh: &CubicMesh,
    w_prev: &[f64],
    theta: &[f64],
    spec: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<SparseSystem> {
    let n = mesh.dof_count();
    let mut triplets = Vec::with_capacity(mesh.elements.len() * NODE_COUNT * NODE_COUNT);
    for (e, el) in mesh.elements.iter().enumerate() {
        let geom = mesh.element_geometry(e);
        let mut nodal = [0.0; NODE_COUNT];
        for (slot, &id) in nodal.iter_mut().zip(el.nodes.iter()) {
            *slot = w_prev[id];
        }
        let mut ke = [[0.0; NODE_COUNT]; NODE_COUNT];
        for (p, wq) in quad.iter() {
            let (_, det) = geom.jacobian(p[0], p[1])?;
            let grads = geom.physical_gradients(p[0], p[1])?;
            let mut g = [0.0, 0.0];
            for i in 0..NODE_COUNT {
                g[0] += grads[i][0] * nodal[i];
                g[1] += grads[i][1] * nodal[i];
            }
            let strain = anti_plane_strain(g);
            if spec.strain.beta * strain.norm >= 1.0 {
                let xy = geom.map_point(p[0], p[1]);
                return Err(Error::StrainLimit {
                    element: e,
                    x: xy[0],
                    y: xy[1],
                    value: spec.strain.beta * strain.norm,
                });
            }
            let arg = match spec.phi_argument {
                PhiArgument::StrainNorm => strain.norm,
                PhiArgument::GradientNorm => (g[0] * g[0] + g[1] * g[1]).sqrt(),
            };
            let c = bounded_phi(arg, &spec.strain) * wq * det;
            for i in 0..NODE_COUNT {
                for j in i..NODE_COUNT {
                    let v = c * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                    ke[i][j] += v;
                    if i != j {
                        ke[j][i] += v;
                    }
                }
            }
        }
        scatter(&mut triplets, &el.nodes, &ke);
    }

    let mut rhs = assemble_coupling_rhs(mesh, theta, spec.xi, quad)?;
    if let Some(f) = &spec.w_source {
        for (e, el) in mesh.elements.iter().enumerate() {
            let geom = mesh.element_geometry(e);
            let l = element_load(&geom, quad, |x, y| f(x, y))?;
            for (i, &id) in el.nodes.iter().enumerate() {
                rhs[id] += l[i];
            }
        }
    }

    Ok(SparseSystem {
        matrix: CsrMatrix::from_triplets(n, &triplets),
        rhs,
        constrained: Vec::new(),
    })
}

/// Coupling right-hand side: entry i is `- sum_K int xi theta_h N_i`.
pub fn assemble_coupling_rhs(
    mesh: &CubicMesh,
    theta: &[f64],
    xi: f64,
    quad: &QuadratureRule,
) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; mesh.dof_count()];
    for (e, el) in mesh.elements.iter().enumerate() {
        let geom = mesh.element_geometry(e);
        let mut nodal = [0.0; NODE_COUNT];
        for (slot, &id) in nodal.iter_mut().zip(el.nodes.iter()) {
            *slot = theta[id];
        }
        for (p, wq) in quad.iter() {
            let (_, det) = geom.jacobian(p[0], p[1])?;
            let n = shape_values(p[0], p[1]);
            let mut th = 0.0;
            for i in 0..NODE_COUNT {
                th += n[i] * nodal[i];
            }
            let c = -xi * th * wq * det;
            for (i, &id) in el.nodes.iter().enumerate() {
                rhs[id] += c * n[i];
            }
        }
    }
    Ok(rhs)
}

/// Values prescribed on every tagged node of `field`, flux-free tags
/// excluded. Conflicting duplicate prescriptions are impossible here (each
/// node carries one tag), but `apply_dirichlet` still guards against them
/// for hand-built constraint sets.
pub fn dirichlet_values(
    mesh: &CubicMesh,
    spec: &ProblemSpec,
    field: Field,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for (id, node) in mesh.nodes.iter().enumerate() {
        if let Some(tag) = &node.tag {
            if spec.flux_free.contains(tag) {
                continue;
            }
            out.push((id, spec.evaluate_bc(field, tag, node.x, node.y)?));
        }
    }
    Ok(out)
}

/// Eliminates Dirichlet constraints symmetrically: constrained columns move
/// to the right-hand side, constrained rows become identity rows carrying
/// the prescribed value. The reduced matrix stays symmetric.
pub fn apply_dirichlet(sys: SparseSystem, bc_values: &[(usize, f64)]) -> Result<SparseSystem> {
    let n = sys.matrix.n;
    let mut value = vec![None::<f64>; n];
    for &(dof, v) in bc_values {
        if dof >= n {
            return Err(Error::ConstraintOutOfRange { dof, dim: n });
        }
        match value[dof] {
            Some(prev) if prev != v => {
                return Err(Error::ConflictingConstraint { dof, a: prev, b: v });
            }
            _ => value[dof] = Some(v),
        }
    }

    let mut matrix = sys.matrix;
    let mut rhs = sys.rhs;
    for i in 0..n {
        let r = matrix.row_ptr[i]..matrix.row_ptr[i + 1];
        if let Some(v) = value[i] {
            rhs[i] = v;
            for k in r {
                matrix.values[k] = if matrix.col_idx[k] == i { 1.0 } else { 0.0 };
            }
        } else {
            for k in r {
                let j = matrix.col_idx[k];
                if let Some(v) = value[j] {
                    rhs[i] -= matrix.values[k] * v;
                    matrix.values[k] = 0.0;
                }
            }
        }
    }

    let mut constrained = sys.constrained;
    constrained.extend(bc_values.iter().copied());
    constrained.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(SparseSystem {
        matrix,
        rhs,
        constrained,
    })
}
