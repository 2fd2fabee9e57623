//! Facet enumeration for a bounded intersection of halfspaces.
//!
//! Each facet is obtained by clipping a large region of its supporting
//! hyperplane against every other halfspace: a segment in the plane, a convex
//! polygon in space. Facets that clip down to nothing (or to a set of zero
//! (n−1)-measure) are redundant. The clipped facets carry everything needed
//! downstream: vertices, facet measures, volume by the divergence theorem and
//! a simplicial decomposition of the body.

use super::linalg::{dot, plane_basis};
use serde::{Deserialize, Serialize};

/// Closed halfspace `normal · x ≤ offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    /// Signed slack `offset − normal·x`; equals the distance to the
    /// supporting hyperplane for unit normals.
    #[inline]
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.offset - dot(&self.normal, x)
    }
}

/// The part of one supporting hyperplane that lies on the boundary.
#[derive(Debug, Clone)]
pub struct FacetCell {
    /// Boundary of the facet, counter-clockwise as seen from outside (3-D),
    /// or the two endpoints in counter-clockwise order (2-D).
    pub points: Vec<Vec<f64>>,
    /// (n−1)-dimensional measure.
    pub measure: f64,
}

type P2 = [f64; 2];

fn clip_polygon(poly: &[P2], g: P2, h: f64) -> Vec<P2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let p = poly[k];
        let q = poly[(k + 1) % n];
        let sp = g[0] * p[0] + g[1] * p[1] - h;
        let sq = g[0] * q[0] + g[1] * q[1] - h;
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn polygon_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for k in 0..n {
        let p = poly[k];
        let q = poly[(k + 1) % n];
        a += p[0] * q[1] - p[1] * q[0];
    }
    0.5 * a
}

fn dedup_cycle(poly: Vec<P2>, tol: f64) -> Vec<P2> {
    let mut out: Vec<P2> = Vec::with_capacity(poly.len());
    for p in poly {
        if let Some(last) = out.last() {
            if (last[0] - p[0]).hypot(last[1] - p[1]) <= tol {
                continue;
            }
        }
        out.push(p);
    }
    while out.len() > 1 {
        let (f, l) = (out[0], out[out.len() - 1]);
        if (f[0] - l[0]).hypot(f[1] - l[1]) <= tol {
            out.pop();
        } else {
            break;
        }
    }
    out
}

/// Axis-aligned box constraints as halfspaces.
fn box_halfspaces(lo: &[f64], hi: &[f64]) -> Vec<Halfspace> {
    let dim = lo.len();
    let mut out = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        out.push(Halfspace::new(e.clone(), hi[k]));
        e[k] = -1.0;
        out.push(Halfspace::new(e, -lo[k]));
    }
    out
}

/// Clips the supporting hyperplane of each halfspace against all others and
/// against the box `[lo, hi]`. Returns `None` for facets with vanishing
/// measure at absolute tolerance `tol`.
pub fn facet_cells(
    halfspaces: &[Halfspace],
    lo: &[f64],
    hi: &[f64],
    tol: f64,
) -> Vec<Option<FacetCell>> {
    let dim = lo.len();
    let boxed = box_halfspaces(lo, hi);
    (0..halfspaces.len())
        .map(|i| match dim {
            2 => facet_segment(halfspaces, &boxed, i, tol),
            3 => facet_polygon(halfspaces, &boxed, i, lo, hi, tol),
            _ => None,
        })
        .collect()
}

fn facet_segment(
    hs: &[Halfspace],
    boxed: &[Halfspace],
    i: usize,
    tol: f64,
) -> Option<FacetCell> {
    let a = &hs[i].normal;
    let b = hs[i].offset;
    let u = [-a[1], a[0]];
    let p0 = [a[0] * b, a[1] * b];
    let mut smin = f64::NEG_INFINITY;
    let mut smax = f64::INFINITY;
    let others = hs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, h)| h)
        .chain(boxed.iter());
    for h in others {
        let g = dot(&h.normal, &u);
        let rhs = h.offset - dot(&h.normal, &p0);
        if g.abs() <= 1e-14 {
            if rhs < -tol {
                return None;
            }
            continue;
        }
        let s = rhs / g;
        if g > 0.0 {
            smax = smax.min(s);
        } else {
            smin = smin.max(s);
        }
    }
    let len = smax - smin;
    if !len.is_finite() || len <= tol {
        return None;
    }
    let start = vec![p0[0] + smin * u[0], p0[1] + smin * u[1]];
    let end = vec![p0[0] + smax * u[0], p0[1] + smax * u[1]];
    Some(FacetCell {
        points: vec![start, end],
        measure: len,
    })
}

fn facet_polygon(
    hs: &[Halfspace],
    boxed: &[Halfspace],
    i: usize,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
) -> Option<FacetCell> {
    let a = &hs[i].normal;
    let b = hs[i].offset;
    let (u, v) = plane_basis(a);
    let center: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let shift = b - dot(a, &center);
    let origin: Vec<f64> = (0..3).map(|k| center[k] + shift * a[k]).collect();
    let half = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| (h - l) * (h - l))
        .sum::<f64>()
        .sqrt()
        .max(tol);
    let mut poly: Vec<P2> = vec![[-half, -half], [half, -half], [half, half], [-half, half]];
    let others = hs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, h)| h)
        .chain(boxed.iter());
    for h in others {
        let g = [dot(&h.normal, &u), dot(&h.normal, &v)];
        let rhs = h.offset - dot(&h.normal, &origin);
        if g[0].hypot(g[1]) <= 1e-14 {
            if rhs < -tol {
                return None;
            }
            continue;
        }
        poly = clip_polygon(&poly, g, rhs);
        if poly.len() < 3 {
            return None;
        }
    }
    let poly = dedup_cycle(poly, tol);
    if poly.len() < 3 {
        return None;
    }
    let area = polygon_area(&poly);
    let max_edge = (0..poly.len())
        .map(|k| {
            let p = poly[k];
            let q = poly[(k + 1) % poly.len()];
            (p[0] - q[0]).hypot(p[1] - q[1])
        })
        .fold(0.0f64, f64::max);
    if area <= tol * max_edge {
        return None;
    }
    let points = poly
        .iter()
        .map(|p| (0..3).map(|k| origin[k] + p[0] * u[k] + p[1] * v[k]).collect())
        .collect();
    Some(FacetCell {
        points,
        measure: area,
    })
}

/// Volume and perimeter of the polytope described by its facet cells, with
/// volume evaluated as `(1/n) Σ (b_i − a_i·c) |F_i|` around the point `c`.
pub fn volume_and_perimeter(
    halfspaces: &[Halfspace],
    cells: &[Option<FacetCell>],
    center: &[f64],
) -> (f64, f64) {
    let dim = center.len() as f64;
    let mut vol = 0.0;
    let mut per = 0.0;
    for (h, cell) in halfspaces.iter().zip(cells) {
        if let Some(c) = cell {
            vol += h.slack(center) * c.measure;
            per += c.measure;
        }
    }
    (vol / dim, per)
}

/// Simplices (as vertex lists) covering the polytope, fanned from `apex`
/// over its facets (3-D facets are fanned from their first vertex).
pub fn simplices(cells: &[Option<FacetCell>], apex: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for cell in cells.iter().flatten() {
        let pts = &cell.points;
        if apex.len() == 2 {
            out.push(vec![apex.to_vec(), pts[0].clone(), pts[1].clone()]);
        } else {
            for k in 1..pts.len() - 1 {
                out.push(vec![
                    apex.to_vec(),
                    pts[0].clone(),
                    pts[k].clone(),
                    pts[k + 1].clone(),
                ]);
            }
        }
    }
    out
}
