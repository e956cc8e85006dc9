//! Manufactured-solution machinery and error norms.
//!
//! The benchmark exact field is `w = sin x sin y` on the unit square, fed
//! through the quasilinear operator `-div(grad w / (1 + |grad w|))` to
//! produce a compatible source term in closed form. Errors are reported as
//! the maximum absolute nodal error, the maximum relative nodal error in
//! percent, and the quadrature-evaluated L2 norm.

use std::sync::Arc;

use crate::assembly::{
    apply_dirichlet, assemble_quasilinear, dirichlet_values, BoundaryData, Field, PhiArgument,
    ProblemSpec,
};
use crate::constitutive::StrainLimitParams;
use crate::element::{quadrature_rule, QuadratureRule, NODE_COUNT};
use crate::error::Result;
use crate::meshgen::{enrich_to_cubic, structured_square_mesh, CubicMesh};
use crate::solver::{solve_linear, LinearSolverKind};

pub fn manufactured_exact(x: f64, y: f64) -> f64 {
    x.sin() * y.sin()
}

pub fn manufactured_exact_gradient(x: f64, y: f64) -> [f64; 2] {
    [x.cos() * y.sin(), x.sin() * y.cos()]
}

/// Source term obtained by pushing the exact field through
/// `-div(grad w / (1 + |grad w|))`. The closed form below was expanded
/// once by symbolic differentiation; the flux-divergence check in the
/// tests guards the transcription.
pub fn manufactured_rhs(x: f64, y: f64) -> f64 {
    let w = x.sin() * y.sin();
    let wx = x.cos() * y.sin();
    let wy = x.sin() * y.cos();
    let g2 = wx * wx + wy * wy;
    let g = g2.sqrt();
    let q = 1.0 + g;
    // -q^-1 laplace(w) + (grad w . H grad w) / (g q^2), H the hessian
    let mut f = 2.0 * w / q;
    if g > 1e-14 {
        let hxy = x.cos() * y.cos();
        let quad_form = -w * g2 + 2.0 * wx * wy * hxy;
        f += quad_form / (g * q * q);
    }
    f
}

/// Problem specification of the manufactured benchmark: zero temperature,
/// the closed-form source on the displacement equation, boundary data from
/// the exact trace, and the plain gradient norm inside the coefficient.
pub fn manufactured_problem() -> ProblemSpec {
    let mut spec = ProblemSpec::new(1.0, 1.0, StrainLimitParams { alpha: 1.0, beta: 1.0 })
        .expect("valid constants");
    spec.phi_argument = PhiArgument::GradientNorm;
    spec.w_source = Some(Arc::new(manufactured_rhs));
    for tag in ["gd1", "gd2", "gd3", "gd4"] {
        spec.theta_bc
            .insert(tag.to_string(), BoundaryData::Constant(0.0));
    }
    spec.w_bc
        .insert("gd1".to_string(), BoundaryData::Constant(0.0));
    spec.w_bc.insert("gd2".to_string(), BoundaryData::SinOneSinY);
    spec.w_bc
        .insert("gd3".to_string(), BoundaryData::Constant(0.0));
    spec.w_bc.insert("gd4".to_string(), BoundaryData::SinOneSinX);
    spec
}

/// Error measures of one discrete field against a closed-form exact field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Maximum absolute nodal error.
    pub e_a: f64,
    /// Maximum relative nodal error, in percent; nodes where the exact
    /// field is below 1e-8 in magnitude are excluded.
    pub e_r_percent: f64,
    /// Quadrature-evaluated L2 norm of the error field.
    pub l2: f64,
}

pub fn error_norms(
    w_h: &[f64],
    mesh: &CubicMesh,
    exact: &dyn Fn(f64, f64) -> f64,
    quad: &QuadratureRule,
) -> Result<ErrorReport> {
    assert_eq!(w_h.len(), mesh.dof_count());
    let mut e_a = 0.0f64;
    let mut e_r = 0.0f64;
    for (node, &value) in mesh.nodes.iter().zip(w_h) {
        let wx = exact(node.x, node.y);
        let err = (value - wx).abs();
        e_a = e_a.max(err);
        if wx.abs() > 1e-8 {
            e_r = e_r.max(err / wx.abs());
        }
    }

    let mut l2_sq = 0.0;
    for (e, el) in mesh.elements.iter().enumerate() {
        let geom = mesh.element_geometry(e);
        let mut nodal = [0.0; NODE_COUNT];
        for (slot, &id) in nodal.iter_mut().zip(el.nodes.iter()) {
            *slot = w_h[id];
        }
        for (p, wq) in quad.iter() {
            let (_, det) = geom.jacobian(p[0], p[1])?;
            let xy = geom.map_point(p[0], p[1]);
            let diff = geom.interpolate(&nodal, p[0], p[1]) - exact(xy[0], xy[1]);
            l2_sq += wq * det * diff * diff;
        }
    }

    Ok(ErrorReport {
        e_a,
        e_r_percent: 100.0 * e_r,
        l2: l2_sq.sqrt(),
    })
}

/// Per-iteration error rows of a manufactured run.
#[derive(Debug, Clone)]
pub struct ManufacturedRun {
    /// Error report after iteration 0, 1, 2, ...
    pub reports: Vec<ErrorReport>,
    /// Final iterate.
    pub w: Vec<f64>,
}

/// Solves the manufactured problem on a given mesh and reports the error
/// after each of the first `iterations + 1` solves.
///
/// Iteration 0 linearises the coefficient at the known exact solution (its
/// nodal interpolant), so its row isolates pure discretisation error;
/// every following iteration is a standard Picard update.
pub fn manufactured_study(
    mesh: &CubicMesh,
    iterations: usize,
    quad_degree: usize,
) -> Result<ManufacturedRun> {
    let spec = manufactured_problem();
    let quad = quadrature_rule(quad_degree)?;
    let bc = dirichlet_values(mesh, &spec, Field::W)?;
    let theta = vec![0.0; mesh.dof_count()];

    let exact_nodal: Vec<f64> = mesh
        .nodes
        .iter()
        .map(|n| manufactured_exact(n.x, n.y))
        .collect();

    let mut reports = Vec::with_capacity(iterations + 1);
    let mut w = exact_nodal;
    for _ in 0..=iterations {
        let sys = assemble_quasilinear(mesh, &w, &theta, &spec, &quad)?;
        let sys = apply_dirichlet(sys, &bc)?;
        w = solve_linear(&sys, LinearSolverKind::Direct)?;
        reports.push(error_norms(&w, mesh, &manufactured_exact, &quad)?);
    }
    Ok(ManufacturedRun { reports, w })
}

/// One mesh of a refinement study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub elements: usize,
    pub h: f64,
    pub dof: usize,
    pub e_a: f64,
    pub e_r_percent: f64,
    pub l2: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of log L2 against log h; `None` when any L2 sits
    /// at the round-off floor and the fit would be meaningless.
    pub fitted_order: Option<f64>,
}

/// Runs the manufactured problem over structured square meshes with the
/// given cell counts per side and fits the L2 convergence order.
pub fn convergence_study(cells_per_side: &[usize], quad_degree: usize) -> Result<ConvergenceStudy> {
    convergence_study_against(cells_per_side, quad_degree, None)
}

/// Same as [`convergence_study`] but with an injected exact solution and
/// matching source; used to exercise degenerate cases such as fields the
/// elements reproduce exactly.
pub fn convergence_study_against(
    cells_per_side: &[usize],
    quad_degree: usize,
    injected: Option<(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>, ProblemSpec)>,
) -> Result<ConvergenceStudy> {
    assert!(cells_per_side.len() >= 3, "need at least three mesh sizes");
    let preset = crate::geometry::preset(crate::geometry::PresetName::UnitSquare);
    let quad = quadrature_rule(quad_degree)?;
    let mut rows = Vec::new();
    for &n in cells_per_side {
        let mesh = enrich_to_cubic(&structured_square_mesh(n), &preset)?;
        let (report, _) = match &injected {
            None => {
                let run = manufactured_study(&mesh, 12, quad_degree)?;
                (*run.reports.last().unwrap(), run.w)
            }
            Some((exact, spec)) => {
                let run = picard_to_fixed_point(&mesh, spec, 12, &quad)?;
                (error_norms(&run, &mesh, &**exact, &quad)?, run)
            }
        };
        rows.push(ConvergenceRow {
            cells: n,
            elements: mesh.elements.len(),
            h: 1.0 / n as f64,
            dof: mesh.dof_count(),
            e_a: report.e_a,
            e_r_percent: report.e_r_percent,
            l2: report.l2,
        });
    }

    let at_floor = rows.iter().any(|r| r.l2 < 1e-13);
    let fitted_order = if at_floor {
        None
    } else {
        Some(fit_log_slope(
            &rows.iter().map(|r| r.h).collect::<Vec<_>>(),
            &rows.iter().map(|r| r.l2).collect::<Vec<_>>(),
        ))
    };
    Ok(ConvergenceStudy { rows, fitted_order })
}

fn picard_to_fixed_point(
    mesh: &CubicMesh,
    spec: &ProblemSpec,
    iterations: usize,
    quad: &QuadratureRule,
) -> Result<Vec<f64>> {
    let bc = dirichlet_values(mesh, spec, Field::W)?;
    let theta = vec![0.0; mesh.dof_count()];
    let mut w = vec![0.0; mesh.dof_count()];
    for _ in 0..=iterations {
        let sys = assemble_quasilinear(mesh, &w, &theta, spec, quad)?;
        let sys = apply_dirichlet(sys, &bc)?;
        w = solve_linear(&sys, LinearSolverKind::Direct)?;
    }
    Ok(w)
}

fn fit_log_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rhs_at_the_critical_point() {
        // grad w vanishes at (pi/2, pi/2); only the laplacian term is left
        let f = manufactured_rhs(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        assert!((f - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn rhs_is_symmetric_under_coordinate_swap() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..200 {
            let a = rng.gen_range(0.0..1.0);
            let b = rng.gen_range(0.0..1.0);
            assert!((manufactured_rhs(a, b) - manufactured_rhs(b, a)).abs() <= 1e-13);
        }
    }

    #[test]
    fn rhs_matches_finite_difference_flux_divergence() {
        // independent check: central differences of the exact flux
        let flux = |x: f64, y: f64| -> [f64; 2] {
            let g = manufactured_exact_gradient(x, y);
            let q = 1.0 + (g[0] * g[0] + g[1] * g[1]).sqrt();
            [g[0] / q, g[1] / q]
        };
        let h = 1e-5;
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..100 {
            let x = rng.gen_range(0.05..0.95);
            let y = rng.gen_range(0.05..0.95);
            let div = (flux(x + h, y)[0] - flux(x - h, y)[0]) / (2.0 * h)
                + (flux(x, y + h)[1] - flux(x, y - h)[1]) / (2.0 * h);
            assert!(
                (div + manufactured_rhs(x, y)).abs() <= 1e-8,
                "at ({x}, {y}): div {div} vs -f {}",
                -manufactured_rhs(x, y)
            );
        }
    }

    #[test]
    fn error_norms_of_exact_cubic_field() {
        let preset = crate::geometry::preset(crate::geometry::PresetName::UnitSquare);
        let mesh = enrich_to_cubic(&structured_square_mesh(2), &preset).unwrap();
        let quad = quadrature_rule(8).unwrap();
        // cubic polynomials interpolate exactly
        let exact = |x: f64, y: f64| 0.3 + x * x * x - 2.0 * y * y + x * y;
        let w: Vec<f64> = mesh.nodes.iter().map(|n| exact(n.x, n.y)).collect();
        let r = error_norms(&w, &mesh, &exact, &quad).unwrap();
        assert!(r.e_a == 0.0);
        assert!(r.l2 <= 1e-12);
    }

    #[test]
    fn constant_offset_shows_up_in_e_a() {
        let preset = crate::geometry::preset(crate::geometry::PresetName::UnitSquare);
        let mesh = enrich_to_cubic(&structured_square_mesh(2), &preset).unwrap();
        let quad = quadrature_rule(8).unwrap();
        let exact = |x: f64, y: f64| x + y;
        let w: Vec<f64> = mesh.nodes.iter().map(|n| exact(n.x, n.y) + 0.125).collect();
        let r = error_norms(&w, &mesh, &exact, &quad).unwrap();
        assert!((r.e_a - 0.125).abs() <= 1e-15);
    }
}
