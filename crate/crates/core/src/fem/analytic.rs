//! Closed-form torsional rigidities used as oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{FemError, Result};
use crate::families::{unit_ball_volume, Family, FamilySpec};

/// A series value with a certified bound on the truncation remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub remainder_bound: f64,
}

/// `T(B_R) = ω_n R^{n+2}/(n(n+2))`, from `u = (R² − |x|²)/(2n)`.
pub fn ball_torsion(n: usize, radius: f64) -> f64 {
    let nf = n as f64;
    unit_ball_volume(n) * radius.powi(n as i32 + 2) / (nf * (nf + 2.0))
}

/// Relative truncation target for the box series.
const SERIES_REL_TOL: f64 = 1e-11;

/// Odd-index cutoff `M` with `c / (6 M³) ≤ target`.
fn cutoff(c: f64, target: f64) -> usize {
    let m = (c / (6.0 * target)).cbrt().ceil().max(1.0) as usize;
    (m | 1).min(1_000_001)
}

/// Torsional rigidity of the box with the given edges (n = 2 or 3).
///
/// The torsion function is expanded in the Dirichlet eigenfunctions of the
/// cross-section orthogonal to the longest edge `c`, and the ODE along that
/// edge is solved exactly:
///
/// `T = Σ_{m odd} Π_i 8a_i/(m_i²π²) · (c − (2/κ)·tanh(κc/2))/κ²`,
/// `κ² = π² Σ_i m_i²/a_i²`.
///
/// Every term is positive and at most `Π_i 8a_i/(m_i²π²) · c/κ²`, which
/// bounds the tail beyond index `M_i` in direction `i` by
/// `(Π_j 8a_j/π²)·(π²/8)^{n−2}·c·a_i²/π² · 1/(6M_i³)`.
pub fn box_torsion(edges: &[f64]) -> Result<SeriesValue> {
    let n = edges.len();
    if !(2..=3).contains(&n) || edges.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(FemError::InvalidInput(format!(
            "box torsion needs 2 or 3 positive edges, got {edges:?}"
        )));
    }
    let long = (0..n)
        .max_by(|&i, &j| edges[i].total_cmp(&edges[j]).then(j.cmp(&i)))
        .unwrap();
    let c = edges[long];
    let a: Vec<f64> = (0..n).filter(|&i| i != long).map(|i| edges[i]).collect();
    let pi2 = PI * PI;
    let term = |ms: &[usize]| -> f64 {
        let mut weight = 1.0;
        let mut kappa2 = 0.0;
        for (ai, &m) in a.iter().zip(ms) {
            let mf = m as f64;
            weight *= 8.0 * ai / (mf * mf * pi2);
            kappa2 += mf * mf / (ai * ai);
        }
        let kappa = PI * kappa2.sqrt();
        weight * (c - 2.0 / kappa * (0.5 * kappa * c).tanh()) / (kappa * kappa)
    };
    let prefactor: f64 = a.iter().map(|ai| 8.0 * ai / pi2).product::<f64>()
        * (pi2 / 8.0).powi(a.len() as i32 - 1)
        * c
        / pi2;
    let first = term(&vec![1; a.len()]);
    let share = SERIES_REL_TOL * first / a.len() as f64;
    let cuts: Vec<usize> = a
        .iter()
        .map(|ai| cutoff(prefactor * ai * ai, share))
        .collect();
    let tail = |m: usize| 1.0 / (6.0 * (m as f64).powi(3));
    let remainder_bound: f64 = a
        .iter()
        .zip(&cuts)
        .map(|(ai, &m)| prefactor * ai * ai * tail(m))
        .sum();
    // Sum smallest terms first for accuracy.
    let value = if a.len() == 1 {
        (1..=cuts[0]).rev().step_by(2).map(|m| term(&[m])).sum()
    } else {
        let mut total = 0.0;
        for m1 in (1..=cuts[0]).rev().step_by(2) {
            let row: f64 = (1..=cuts[1]).rev().step_by(2).map(|m2| term(&[m1, m2])).sum();
            total += row;
        }
        total
    };
    Ok(SeriesValue {
        value,
        remainder_bound,
    })
}

/// Torsional rigidity of the `a × b` rectangle.
pub fn rectangle_torsion(a: f64, b: f64) -> Result<SeriesValue> {
    box_torsion(&[a, b])
}

/// First-order thin-domain torsion `(1/12)∫_base height³`.
///
/// Cones of height `1/k` over the unit (n−1)-ball give
/// `ω_{n−1}/(2n(n+1)(n+2)k³)`; cylinders of height `1/ell` over the unit
/// cube give `1/(12 ell³)`; boxes use the shortest edge as the height.
pub fn thin_torsion_estimate(spec: &FamilySpec) -> Result<f64> {
    spec.validate()
        .map_err(|e| FemError::InvalidInput(e.to_string()))?;
    let n = spec.dim as f64;
    let get = |key: &str| spec.params.get(key).copied().unwrap_or(1.0);
    match spec.family {
        Family::Cone => {
            let k = get("k");
            Ok(unit_ball_volume(spec.dim - 1) / (2.0 * n * (n + 1.0) * (n + 2.0) * k.powi(3)))
        }
        Family::Cylinder => Ok(1.0 / (12.0 * get("ell").powi(3))),
        Family::Box => {
            let edges: Vec<f64> = (0..spec.dim).map(|i| get(&format!("a{i}"))).collect();
            let h = edges.iter().copied().fold(f64::INFINITY, f64::min);
            let base: f64 = edges.iter().product::<f64>() / h;
            Ok(base * h.powi(3) / 12.0)
        }
        _ => Err(FemError::NotThinRepresentable(spec.label())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_values() {
        assert!((ball_torsion(2, 1.0) - PI / 8.0).abs() < 1e-15);
        assert!((ball_torsion(3, 1.0) - 4.0 * PI / 45.0).abs() < 1e-15);
        assert!((ball_torsion(2, 2.0) - 16.0 * PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn unit_square_series() {
        let t = rectangle_torsion(1.0, 1.0).unwrap();
        assert!((t.value - 0.035_144_253_738_788).abs() < 1e-12, "{}", t.value);
        assert!(t.remainder_bound < 1e-10 * t.value);
    }

    #[test]
    fn box_is_symmetric_in_its_edges() {
        let a = box_torsion(&[1.0, 0.5, 0.25]).unwrap().value;
        let b = box_torsion(&[0.25, 1.0, 0.5]).unwrap().value;
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn thin_estimates() {
        let t2 = thin_torsion_estimate(&FamilySpec::cone(2, 10.0)).unwrap();
        assert!((t2 - 1.0 / 24_000.0).abs() < 1e-18);
        let t3 = thin_torsion_estimate(&FamilySpec::cone(3, 100.0)).unwrap();
        assert!((t3 - PI / 120e6).abs() < 1e-20);
        let tc = thin_torsion_estimate(&FamilySpec::cylinder(3, 10.0)).unwrap();
        assert!((tc - 1.0 / 12_000.0).abs() < 1e-18);
        assert!(matches!(
            thin_torsion_estimate(&FamilySpec::simplex(2)),
            Err(FemError::NotThinRepresentable(_))
        ));
    }
}
