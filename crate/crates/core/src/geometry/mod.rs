//! Exact computational geometry of convex polytopes in two and three
//! dimensions: dual representations, scalar functionals, the boundary
//! distance function and inner parallel bodies.

mod body;
pub mod cells;
mod hull;
pub mod io;
pub mod linalg;
pub mod lp;
mod summary;
mod width;

pub use body::{ConvexBody, Provenance};
pub use cells::Halfspace;
pub use summary::GeometrySummary;
pub use width::FIBONACCI_DIRECTIONS;

use thiserror::Error;

/// Relative geometric tolerance; absolute tolerances are this times the
/// diameter of the body in question.
pub const EPS_GEOM_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("halfspace intersection is unbounded")]
    Unbounded,
    #[error("explicit geometry supports dimensions 2 and 3, got {dim}")]
    DimensionUnsupported { dim: usize },
    #[error("Chebyshev-center LP failed: {0}")]
    LpFailure(String),
    #[error("point lies outside the body (constraint violated by {violation:e})")]
    OutsideBody { violation: f64 },
    #[error("erosion depth {t} is not below the inradius {inradius}")]
    EmptyErosion { t: f64, inradius: f64 },
}

pub type Result<T> = std::result::Result<T, GeometryError>;
