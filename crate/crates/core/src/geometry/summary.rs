use serde::{Deserialize, Serialize};

use super::width::minimal_width;
use super::{ConvexBody, GeometryError, Result};

/// Scalar functionals of a body and the dimensionless remainders built from
/// them:
///
/// * `alpha = w / diam` (thinness),
/// * `beta = P·R/|Ω| − 1 ∈ (0, n−1]`,
/// * `gamma = n − P·R/|Ω| ∈ [0, n−1)`, zero exactly on tangential bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub dim: usize,
    pub volume: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub incenter: Vec<f64>,
    pub minwidth: f64,
    /// Zero in the plane, where the width is exact.
    pub minwidth_error: f64,
    pub diameter: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GeometrySummary {
    /// The ratio `P·R/|Ω|`, which lies in `(1, n]`.
    pub fn pr_ratio(&self) -> f64 {
        self.perimeter * self.inradius / self.volume
    }
}

/// `(beta, gamma)` from the ratio `q = P·R/|Ω|`; the pair sums to `n − 1`.
pub fn remainders(dim: usize, q: f64) -> (f64, f64) {
    let beta = q - 1.0;
    let gamma = (dim as f64 - 1.0) - beta;
    (beta, gamma)
}

impl ConvexBody {
    pub fn summarize(&self) -> Result<GeometrySummary> {
        if !(self.inradius() > 0.0) || !self.inradius().is_finite() {
            return Err(GeometryError::LpFailure(format!(
                "invalid Chebyshev radius {}",
                self.inradius()
            )));
        }
        let width = minimal_width(self);
        let q = self.perimeter() * self.inradius() / self.volume();
        let (beta, gamma) = remainders(self.dim(), q);
        Ok(GeometrySummary {
            dim: self.dim(),
            volume: self.volume(),
            perimeter: self.perimeter(),
            inradius: self.inradius(),
            incenter: self.incenter().to_vec(),
            minwidth: width.width,
            minwidth_error: width.error_bound,
            diameter: self.diameter(),
            alpha: width.width / self.diameter(),
            beta,
            gamma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral() -> ConvexBody {
        ConvexBody::from_vertices(
            2,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![0.5, 3f64.sqrt() / 2.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn unit_square_summary() {
        let b = ConvexBody::from_vertices(
            2,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap();
        let s = b.summarize().unwrap();
        assert!((s.volume - 1.0).abs() < 1e-15);
        assert!((s.perimeter - 4.0).abs() < 1e-15);
        assert!((s.inradius - 0.5).abs() < 1e-15);
        assert!((s.minwidth - 1.0).abs() < 1e-15);
        assert!((s.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.alpha - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(s.gamma.abs() < 1e-14);
        assert!((s.beta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equilateral_triangle_is_tangential() {
        // R = 1/(2√3), |Ω| = √3/4, P = 3 ⇒ P·R/|Ω| = 2.
        let s = equilateral().summarize().unwrap();
        assert!((s.inradius - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((s.volume - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((s.pr_ratio() - 2.0).abs() < 1e-14);
        assert!(s.gamma.abs() < 1e-14);
        assert!((s.beta - 1.0).abs() < 1e-14);
    }

    #[test]
    fn beta_plus_gamma_is_n_minus_one() {
        for (dim, q) in [(2, 1.3), (3, 2.999), (3, 1.0001), (2, 1.9999999)] {
            let (b, g) = remainders(dim, q);
            assert_eq!(b + g, dim as f64 - 1.0);
        }
    }

    #[test]
    fn thin_box_width_is_found_in_space() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 0.1] {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let s = ConvexBody::from_vertices(3, pts).unwrap().summarize().unwrap();
        assert!((s.minwidth - 0.1).abs() < 1e-12);
        assert!(s.minwidth_error >= 0.0);
        assert!(s.minwidth <= s.diameter && 2.0 * s.inradius <= s.minwidth + 1e-12);
    }
}
