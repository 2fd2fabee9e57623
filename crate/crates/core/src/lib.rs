//! Torsional rigidity and convex-geometric functionals of convex polytopes,
//! and numerical checks of the sharp upper bound
//! `T(Ω)·P(Ω)²/|Ω|³ ≤ 2n²/((n+1)(n+2))` together with its quantitative
//! refinements.

pub mod geometry;
pub mod families;
pub mod fem;
pub mod lab;
pub mod profile;
pub mod report;
