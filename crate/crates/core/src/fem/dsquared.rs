//! `∫_Ω d(x, ∂Ω)² dx` for polytopes.
//!
//! On a polytope `d(x) = min_i (b_i − a_i·x)`. The primary method splits `Ω`
//! into the convex nearest-facet regions
//! `E_i = Ω ∩ {(a_j − a_i)·x ≤ b_j − b_i for all j}`, on each of which `d` is
//! the single affine function `b_i − a_i·x`; each region is cut into simplices
//! and integrated exactly with
//! `∫_S ℓ² = |S|/((n+1)(n+2)) · (Σ ℓ_k² + (Σ ℓ_k)²)` over the vertex values.
//!
//! The mesh method integrates cell by cell instead: a cell on which one facet
//! is the minimizer at every vertex of every competing difference is done
//! exactly; other cells are subdivided up to depth 4 and the remaining mixed
//! leaves use a fixed quadrature rule.

use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use crate::geometry::cells::{facet_cells, simplices};
use crate::geometry::linalg::{dist, factorial, simplex_det};
use crate::geometry::{ConvexBody, Halfspace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DSquared {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
}

/// Exact integral of `ℓ²` for an affine `ℓ` with the given vertex values.
fn simplex_square_integral(volume: f64, values: &[f64]) -> f64 {
    let n = values.len() as f64 - 1.0;
    let sum: f64 = values.iter().sum();
    let sq: f64 = values.iter().map(|v| v * v).sum();
    volume / ((n + 1.0) * (n + 2.0)) * (sq + sum * sum)
}

fn simplex_volume(points: &[&[f64]]) -> f64 {
    simplex_det(points).abs() / factorial(points.len() - 1)
}

/// Exact nearest-facet decomposition.
pub fn integrate_d_squared(body: &ConvexBody) -> DSquared {
    let hs = body.halfspaces();
    let (lo, hi) = body.bounding_box();
    let extent = dist(lo, hi);
    let pad = 1e-6 * extent;
    let blo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
    let bhi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
    let tol = 1e-14 * extent;
    let mut value = 0.0;
    let mut covered = 0.0;
    for (i, hi_) in hs.iter().enumerate() {
        let mut region: Vec<Halfspace> = hs.to_vec();
        for (j, hj) in hs.iter().enumerate() {
            if j == i {
                continue;
            }
            let normal: Vec<f64> = hj.normal.iter().zip(&hi_.normal).map(|(a, b)| a - b).collect();
            let len = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            region.push(Halfspace::new(
                normal.iter().map(|v| v / len).collect(),
                (hj.offset - hi_.offset) / len,
            ));
        }
        let cells = facet_cells(&region, &blo, &bhi, tol);
        let pts: Vec<&Vec<f64>> = cells.iter().flatten().flat_map(|c| c.points.iter()).collect();
        if pts.is_empty() {
            continue;
        }
        let mut apex = vec![0.0; body.dim()];
        for p in &pts {
            for (a, x) in apex.iter_mut().zip(p.iter()) {
                *a += x;
            }
        }
        apex.iter_mut().for_each(|a| *a /= pts.len() as f64);
        for s in simplices(&cells, &apex) {
            let refs: Vec<&[f64]> = s.iter().map(|p| p.as_slice()).collect();
            let vol = simplex_volume(&refs);
            let vals: Vec<f64> = s.iter().map(|p| hi_.slack(p).max(0.0)).collect();
            value += simplex_square_integral(vol, &vals);
            covered += vol;
        }
    }
    let r = body.inradius();
    let error = (covered - body.volume()).abs() * r * r + 1e-13 * value;
    DSquared { value, error }
}

/// Dunavant's 6-point rule on the triangle (degree 4), barycentric.
const TRI_RULE: [([f64; 3], f64); 6] = [
    ([0.108_103_018_168_070, 0.445_948_490_915_965, 0.445_948_490_915_965], 0.223_381_589_678_011),
    ([0.445_948_490_915_965, 0.108_103_018_168_070, 0.445_948_490_915_965], 0.223_381_589_678_011),
    ([0.445_948_490_915_965, 0.445_948_490_915_965, 0.108_103_018_168_070], 0.223_381_589_678_011),
    ([0.816_847_572_980_459, 0.091_576_213_509_771, 0.091_576_213_509_771], 0.109_951_743_655_322),
    ([0.091_576_213_509_771, 0.816_847_572_980_459, 0.091_576_213_509_771], 0.109_951_743_655_322),
    ([0.091_576_213_509_771, 0.091_576_213_509_771, 0.816_847_572_980_459], 0.109_951_743_655_322),
];

/// Symmetric 4-point rule on the tetrahedron (degree 2), barycentric.
const TET_A: f64 = 0.585_410_196_624_968_5;
const TET_B: f64 = 0.138_196_601_125_010_5;
const TET_RULE: [([f64; 4], f64); 4] = [
    ([TET_A, TET_B, TET_B, TET_B], 0.25),
    ([TET_B, TET_A, TET_B, TET_B], 0.25),
    ([TET_B, TET_B, TET_A, TET_B], 0.25),
    ([TET_B, TET_B, TET_B, TET_A], 0.25),
];

const MAX_DEPTH: usize = 4;

fn at(points: &[Vec<f64>], bary: &[f64]) -> Vec<f64> {
    let dim = points[0].len();
    (0..dim)
        .map(|k| points.iter().zip(bary).map(|(p, w)| w * p[k]).sum())
        .collect()
}

fn mid(p: &[f64], q: &[f64]) -> Vec<f64> {
    p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect()
}

/// Children of a simplex under one midpoint subdivision.
fn children(s: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    if s.len() == 3 {
        let (m01, m02, m12) = (mid(&s[0], &s[1]), mid(&s[0], &s[2]), mid(&s[1], &s[2]));
        vec![
            vec![s[0].clone(), m01.clone(), m02.clone()],
            vec![m01.clone(), s[1].clone(), m12.clone()],
            vec![m02.clone(), m12.clone(), s[2].clone()],
            vec![m01, m12, m02],
        ]
    } else {
        let m = |i: usize, j: usize| mid(&s[i], &s[j]);
        let (m01, m02, m03, m12, m13, m23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
        vec![
            vec![s[0].clone(), m01.clone(), m02.clone(), m03.clone()],
            vec![m01.clone(), s[1].clone(), m12.clone(), m13.clone()],
            vec![m02.clone(), m12.clone(), s[2].clone(), m23.clone()],
            vec![m03.clone(), m13.clone(), m23.clone(), s[3].clone()],
            vec![m01.clone(), m23.clone(), m02.clone(), m03.clone()],
            vec![m01.clone(), m23.clone(), m03.clone(), m13.clone()],
            vec![m01.clone(), m23.clone(), m13.clone(), m12.clone()],
            vec![m01, m23, m12, m02],
        ]
    }
}

/// Index of the facet that is nearest on all of `s`, if there is one.
fn single_active(body: &ConvexBody, s: &[Vec<f64>]) -> Option<usize> {
    let hs = body.halfspaces();
    let center = at(s, &vec![1.0 / s.len() as f64; s.len()]);
    let i = (0..hs.len())
        .min_by(|&x, &y| hs[x].slack(&center).total_cmp(&hs[y].slack(&center)))
        .unwrap();
    // slack_j − slack_i is affine, so its minimum over s sits at a vertex.
    let ok = (0..hs.len()).all(|j| {
        j == i || s.iter().all(|p| hs[j].slack(p) - hs[i].slack(p) >= 0.0)
    });
    ok.then_some(i)
}

fn leaf_rule(body: &ConvexBody, s: &[Vec<f64>], vol: f64) -> (f64, f64) {
    let d2 = |p: &[f64]| body.facet_distance(p).max(0.0).powi(2);
    let (high, low) = if s.len() == 3 {
        let high: f64 = TRI_RULE.iter().map(|(b, w)| w * d2(&at(s, b))).sum();
        let low: f64 = [[2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0], [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0]]
            .iter()
            .map(|b| d2(&at(s, b)) / 3.0)
            .sum();
        (high, low)
    } else {
        let high: f64 = TET_RULE.iter().map(|(b, w)| w * d2(&at(s, b))).sum();
        (high, d2(&at(s, &[0.25; 4])))
    };
    (vol * high, vol * (high - low).abs())
}

fn integrate_cell(body: &ConvexBody, s: Vec<Vec<f64>>, depth: usize) -> (f64, f64) {
    let refs: Vec<&[f64]> = s.iter().map(|p| p.as_slice()).collect();
    let vol = simplex_volume(&refs);
    if let Some(i) = single_active(body, &s) {
        let h = &body.halfspaces()[i];
        let vals: Vec<f64> = s.iter().map(|p| h.slack(p).max(0.0)).collect();
        return (simplex_square_integral(vol, &vals), 0.0);
    }
    if depth == MAX_DEPTH {
        return leaf_rule(body, &s, vol);
    }
    children(&s)
        .into_iter()
        .map(|c| integrate_cell(body, c, depth + 1))
        .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1))
}

/// Cell-by-cell integration on a mesh of `body`.
pub fn integrate_d_squared_on_mesh(body: &ConvexBody, mesh: &Mesh) -> DSquared {
    let (mut value, mut error) = (0.0, 0.0);
    for c in 0..mesh.cell_count() {
        let s: Vec<Vec<f64>> = mesh.cell(c).iter().map(|&i| mesh.node(i).to_vec()).collect();
        let (v, e) = integrate_cell(body, s, 0);
        value += v;
        error += e;
    }
    DSquared {
        value,
        error: error + 1e-13 * value,
    }
}
