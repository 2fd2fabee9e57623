//! Conforming P1 finite elements for the torsion problem `−Δu = 1`, `u = 0`
//! on `∂Ω`, the integral `∫_Ω d(x, ∂Ω)² dx`, and analytic torsion oracles.
//!
//! The discrete value is reported through the quotient `(∫u_h)²/∫|∇u_h|²`,
//! which is admissible in the variational characterization of `T(Ω)` for any
//! iterate `u_h`, so every reported `T_h` is a lower bound for `T(Ω)` no
//! matter how far the linear solver got.

mod analytic;
mod dsquared;
mod mesh;
mod solve;

pub use analytic::{
    box_torsion, ball_torsion, rectangle_torsion, thin_torsion_estimate, SeriesValue,
};
pub use dsquared::{integrate_d_squared, integrate_d_squared_on_mesh, DSquared};
pub use mesh::{default_node_cap, mesh_convex, Mesh, MeshExport, DEFAULT_NODE_CAP};
pub use solve::{
    auto_mesh, solve_torsion, torsion_ladder, torsion_ladder_with, LevelResult, SolverConfig, TorsionLadder,
    TorsionSolution,
};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemError {
    #[error("mesh would need {nodes} nodes, above the cap of {cap}")]
    MeshBudgetExceeded { nodes: usize, cap: usize },
    #[error("conjugate gradients stalled after {iterations} iterations at relative residual {residual:e}")]
    SolverDiverged { iterations: usize, residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no thin-profile representation for {0}")]
    NotThinRepresentable(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, FemError>;
