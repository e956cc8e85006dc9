//! Linear solves and the Picard outer iteration.
//!
//! The temperature problem is solved once; its field then drives the
//! right-hand side of every Picard step for the displacement. Each step
//! freezes the quasilinear coefficient at the previous iterate and solves
//! a linear system. The first iterate comes from freezing the coefficient
//! at the zero field. An update whose strain leaves the admissible set is
//! pulled back toward the previous iterate until it re-enters; those
//! damping events are counted and reported.

use crate::assembly::{
    apply_dirichlet, assemble_diffusion, assemble_quasilinear, dirichlet_values,
    strain_limit_measure, Field, ProblemSpec, SparseSystem,
};
use crate::element::{quadrature_rule, QuadratureRule};
use crate::error::{Error, Result};
use crate::linalg::{solve_cg, SkylineCholesky};
use crate::meshgen::CubicMesh;

/// Linear solver backing each Picard step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolverKind {
    /// Sparse envelope Cholesky; exact and bitwise deterministic.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradient.
    Cg,
}

/// Stopping metric of the Picard loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvergenceMetric {
    /// ||w_next - w_prev|| / ||w_next||
    Relative,
    /// max_i |w_next_i - w_prev_i|
    #[default]
    MaxAbs,
}

#[derive(Debug, Clone, Copy)]
pub struct PicardConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub metric: ConvergenceMetric,
    /// First damping factor tried when an update violates the strain limit;
    /// halved until the update becomes admissible.
    pub damping: f64,
    pub linear: LinearSolverKind,
    pub quad_degree: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 50,
            metric: ConvergenceMetric::MaxAbs,
            damping: 0.5,
            linear: LinearSolverKind::Direct,
            quad_degree: 8,
        }
    }
}

/// One recorded Picard step.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    /// 1-based iteration index (the initial frozen-coefficient guess is
    /// iteration 0 and carries no error value).
    pub iteration: usize,
    pub max_abs: f64,
    pub relative: f64,
    /// Damping events triggered while admitting this iterate.
    pub damping_events: usize,
    /// Relative residual of the linear solve.
    pub linear_residual: f64,
}

impl IterationRecord {
    pub fn error(&self, metric: ConvergenceMetric) -> f64 {
        match metric {
            ConvergenceMetric::Relative => self.relative,
            ConvergenceMetric::MaxAbs => self.max_abs,
        }
    }
}

/// Converged fields and the full iteration history.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub theta: Vec<f64>,
    pub w: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations_used: usize,
    pub damping_events: usize,
}

/// Solves one constrained SPD system; checks the relative residual.
pub fn solve_linear(sys: &SparseSystem, kind: LinearSolverKind) -> Result<Vec<f64>> {
    solve_linear_with_residual(sys, kind).map(|(x, _)| x)
}

fn solve_linear_with_residual(
    sys: &SparseSystem,
    kind: LinearSolverKind,
) -> Result<(Vec<f64>, f64)> {
    let x = match kind {
        LinearSolverKind::Direct => SkylineCholesky::factor(&sys.matrix)?.solve(&sys.rhs),
        LinearSolverKind::Cg => solve_cg(&sys.matrix, &sys.rhs, 1e-12, 20 * sys.matrix.n.max(100))?,
    };
    let ax = sys.matrix.matvec(&x);
    let norm_b: f64 = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let res: f64 = ax
        .iter()
        .zip(&sys.rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let rel = if norm_b > 0.0 { res / norm_b } else { res };
    if rel > 1e-10 {
        return Err(Error::LinearSolve(format!(
            "relative residual {rel:.3e} exceeds 1e-10"
        )));
    }
    Ok((x, rel))
}

/// Solves the linear diffusion problem for the temperature field.
pub fn solve_temperature(
    mesh: &CubicMesh,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
) -> Result<Vec<f64>> {
    solve_temperature_with(mesh, spec, quad, LinearSolverKind::Direct)
}

fn solve_temperature_with(
    mesh: &CubicMesh,
    spec: &ProblemSpec,
    quad: &QuadratureRule,
    kind: LinearSolverKind,
) -> Result<Vec<f64>> {
    let sys = assemble_diffusion(mesh, spec, quad)?;
    let bc = dirichlet_values(mesh, spec, Field::Theta)?;
    let sys = apply_dirichlet(sys, &bc)?;
    solve_linear(&sys, kind)
}

/// Output of [`picard_solve`]: the displacement part of a [`SolveReport`].
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub w: Vec<f64>,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    pub iterations_used: usize,
    pub damping_events: usize,
}

/// Runs the Picard iteration for the displacement given a fixed
/// temperature field.
pub fn picard_solve(
    mesh: &CubicMesh,
    theta: &[f64],
    spec: &ProblemSpec,
    cfg: &PicardConfig,
) -> Result<PicardOutcome> {
    let quad = quadrature_rule(cfg.quad_degree)?;
    let bc = dirichlet_values(mesh, spec, Field::W)?;
    let zero = vec![0.0; mesh.dof_count()];

    // Initial guess: coefficient frozen at the zero field.
    let (mut w_prev, mut damping_total) =
        picard_step(mesh, &zero, theta, spec, cfg, &quad, &bc)?.split();

    let mut history = Vec::new();
    let mut converged = false;
    for iteration in 1..=cfg.max_iters {
        let step = picard_step(mesh, &w_prev, theta, spec, cfg, &quad, &bc)?;
        damping_total += step.damping_events;
        let w_next = step.w;

        let mut max_abs = 0.0f64;
        let mut diff2 = 0.0;
        let mut norm2 = 0.0;
        for (a, b) in w_next.iter().zip(&w_prev) {
            let d = a - b;
            max_abs = max_abs.max(d.abs());
            diff2 += d * d;
            norm2 += a * a;
        }
        let relative = if norm2 > 0.0 {
            (diff2 / norm2).sqrt()
        } else {
            diff2.sqrt()
        };
        let record = IterationRecord {
            iteration,
            max_abs,
            relative,
            damping_events: step.damping_events,
            linear_residual: step.linear_residual,
        };
        history.push(record);
        w_prev = w_next;
        if record.error(cfg.metric) < cfg.tol {
            converged = true;
            break;
        }
    }

    let iterations_used = history.len();
    Ok(PicardOutcome {
        w: w_prev,
        history,
        converged,
        iterations_used,
        damping_events: damping_total,
    })
}

struct StepResult {
    w: Vec<f64>,
    damping_events: usize,
    linear_residual: f64,
}

impl StepResult {
    fn split(self) -> (Vec<f64>, usize) {
        (self.w, self.damping_events)
    }
}

/// One frozen-coefficient solve followed by the admissibility safeguard.
fn picard_step(
    mesh: &CubicMesh,
    w_frozen: &[f64],
    theta: &[f64],
    spec: &ProblemSpec,
    cfg: &PicardConfig,
    quad: &QuadratureRule,
    bc: &[(usize, f64)],
) -> Result<StepResult> {
    let sys = assemble_quasilinear(mesh, w_frozen, theta, spec, quad)?;
    let sys = apply_dirichlet(sys, bc)?;
    let (w_hat, linear_residual) = solve_linear_with_residual(&sys, cfg.linear)?;

    if spec.strain.beta == 0.0 {
        return Ok(StepResult {
            w: w_hat,
            damping_events: 0,
            linear_residual,
        });
    }

    let mut damping_events = 0usize;
    let mut lambda = 1.0;
    let mut candidate = w_hat.clone();
    loop {
        if strain_limit_measure(mesh, &candidate, &spec.strain, quad)? < 1.0 {
            return Ok(StepResult {
                w: candidate,
                damping_events,
                linear_residual,
            });
        }
        lambda = if damping_events == 0 { cfg.damping } else { lambda * 0.5 };
        damping_events += 1;
        if lambda < 1e-6 {
            return Err(Error::IrrecoverableStrainLimit);
        }
        candidate = w_frozen
            .iter()
            .zip(&w_hat)
            .map(|(prev, hat)| prev + lambda * (hat - prev))
            .collect();
    }
}

/// Full coupled solve: temperature first, then the Picard loop.
pub fn solve_coupled(
    mesh: &CubicMesh,
    spec: &ProblemSpec,
    cfg: &PicardConfig,
) -> Result<SolveReport> {
    spec.validate_against(mesh)?;
    let quad = quadrature_rule(cfg.quad_degree)?;
    let theta = solve_temperature_with(mesh, spec, &quad, cfg.linear)?;
    let outcome = picard_solve(mesh, &theta, spec, cfg)?;
    Ok(SolveReport {
        theta,
        w: outcome.w,
        history: outcome.history,
        converged: outcome.converged,
        iterations_used: outcome.iterations_used,
        damping_events: outcome.damping_events,
    })
}
