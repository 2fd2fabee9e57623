//! The inequality chain around the sharp upper bound: evaluations, exact
//! polynomial certificates, family sweeps and random corpora.

mod corpus;
mod evaluate;
mod polynomial;
mod sweep;

pub use corpus::{Corpus, CorpusEntry};
pub use evaluate::{
    c1, c1_gamma_pow, c2, evaluate, evaluate_family, InequalityReport, Remainders, TorsionMethod, Values,
    FEM_CONE_MAX_K, STRICT_GAP,
};
pub use polynomial::{certify_polynomials, h_coefficients, twice_g_coefficients, PolynomialCertificate};
pub use sweep::{log_log_slope, sweep, SweepReport, SweepRow, SweepSlopes};

use thiserror::Error;

use crate::families::FamilyError;
use crate::fem::FemError;
use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

pub type Result<T> = std::result::Result<T, LabError>;
