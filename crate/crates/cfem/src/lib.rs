//! Finite element solver for a coupled thermoelastic system on notched
//! two-dimensional domains: a linear diffusion equation for the
//! temperature and a Picard-linearised quasilinear equation for the
//! anti-plane displacement of a strain-limiting elastic body.
//!
//! The discretisation uses ten-node cubic triangles; elements adjacent to
//! circular inclusions carry one parabolic edge fitted to the exact arc, so
//! curved interfaces introduce no geometric discretisation error. Meshes
//! come from a signed-distance force-equilibrium generator plus a
//! structured mode for the square benchmark.

pub mod assembly;
pub mod cli;
pub mod constitutive;
pub mod element;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod meshgen;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
