use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown domain preset `{0}` (expected unit_square, vnotch or vnotch_with_inclusion)")]
    UnknownPreset(String),

    #[error("unknown boundary tag `{0}`")]
    UnknownTag(String),

    #[error("mesh generation did not settle after {iters} iterations (last movement {movement:.3e})")]
    MeshNotConverged { iters: usize, movement: f64 },

    #[error("domain contains no interior points at spacing h0 = {h0}")]
    DegenerateDomain { h0: f64 },

    #[error("element {element} touches {count} curved arc edges; only one curved edge is supported")]
    MultipleCurvedEdges { element: usize, count: usize },

    #[error(
        "curved edge of element {element} subtends {angle:.3} rad, above the limit {limit:.3}; \
         the arc is under-resolved at this mesh size"
    )]
    ArcUnderResolved { element: usize, angle: f64, limit: f64 },

    #[error("no tabulated quadrature rule with exactness degree >= {0}")]
    QuadratureDegree(usize),

    #[error("non-positive jacobian determinant {det:.3e} (element is inverted or tangled)")]
    SingularJacobian { det: f64 },

    #[error("strain limit reached: beta * |strain| = {value:.6} >= 1 at ({x:.5}, {y:.5}) in element {element}")]
    StrainLimit {
        element: usize,
        x: f64,
        y: f64,
        value: f64,
    },

    #[error("strain limit reached: beta * s = {0:.6} >= 1")]
    StrainLimitScalar(f64),

    #[error("conflicting Dirichlet values {a} and {b} prescribed at dof {dof}")]
    ConflictingConstraint { dof: usize, a: f64, b: f64 },

    #[error("constrained dof {dof} out of range for system of dimension {dim}")]
    ConstraintOutOfRange { dof: usize, dim: usize },

    #[error("matrix is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("Picard update is inadmissible even with damping factor below 1e-6")]
    IrrecoverableStrainLimit,

    #[error("boundary tag `{tag}` has no Dirichlet data for {field} and is not marked flux-free")]
    MissingBoundaryData { tag: String, field: &'static str },

    #[error("{path}:{line}: {message}")]
    MeshParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported export format `{0}` (expected csv or vtk)")]
    ExportFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
