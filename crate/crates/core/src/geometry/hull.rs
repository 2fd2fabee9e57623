//! Supporting halfspaces of the convex hull of a point cloud.

use super::cells::Halfspace;
use super::linalg::{affine_rank, cross, dot, norm, sub};
use super::{GeometryError, Result};

/// Returns a (possibly redundant) set of halfspaces whose intersection is the
/// convex hull of `points`. Non-extreme points are harmless: the halfspace
/// builder discards whatever does not support a facet.
pub fn supporting_halfspaces(dim: usize, points: &[Vec<f64>]) -> Result<Vec<Halfspace>> {
    let scale = points
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let rank = affine_rank(points, 1e-9 * scale);
    if rank < dim {
        return Err(GeometryError::DegenerateBody(format!(
            "affine hull has dimension {rank} < {dim}"
        )));
    }
    match dim {
        2 => Ok(planar_hull(points)),
        3 => Ok(spatial_planes(points, tol)),
        _ => Err(GeometryError::DimensionUnsupported { dim }),
    }
}

/// Andrew's monotone chain; edges become halfspaces.
fn planar_hull(points: &[Vec<f64>]) -> Vec<Halfspace> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let turn = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    let m = hull.len();
    (0..m)
        .map(|k| {
            let p = hull[k];
            let q = hull[(k + 1) % m];
            let e = [q[0] - p[0], q[1] - p[1]];
            let normal = vec![e[1], -e[0]];
            let offset = normal[0] * p[0] + normal[1] * p[1];
            Halfspace::new(normal, offset)
        })
        .collect()
}

/// Planes through point triples with every point on one side. Quadratic in
/// the number of supporting planes, cubic in points in the worst case, with
/// early exit on the side test.
fn spatial_planes(points: &[Vec<f64>], tol: f64) -> Vec<Halfspace> {
    let m = points.len();
    let mut out: Vec<Halfspace> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let e1 = sub(&points[j], &points[i]);
            for k in j + 1..m {
                let e2 = sub(&points[k], &points[i]);
                let c = cross(&e1, &e2);
                let len = norm(&c);
                if len <= tol * norm(&e1).max(norm(&e2)) {
                    continue;
                }
                let normal = [c[0] / len, c[1] / len, c[2] / len];
                let offset = dot(&normal, &points[i]);
                let (mut above, mut below) = (false, false);
                for p in points {
                    let s = dot(&normal, p) - offset;
                    above |= s > tol;
                    below |= s < -tol;
                    if above && below {
                        break;
                    }
                }
                if above && below {
                    continue;
                }
                let (normal, offset) = if above {
                    ([-normal[0], -normal[1], -normal[2]], -offset)
                } else {
                    (normal, offset)
                };
                let dup = out.iter().any(|h| {
                    (h.normal[0] - normal[0]).abs() < 1e-9
                        && (h.normal[1] - normal[1]).abs() < 1e-9
                        && (h.normal[2] - normal[2]).abs() < 1e-9
                });
                if !dup {
                    out.push(Halfspace::new(normal.to_vec(), offset));
                }
            }
        }
    }
    // Offsets from the extreme point for each normal, not the triple's plane.
    for h in &mut out {
        h.offset = points
            .iter()
            .map(|p| dot(&h.normal, p))
            .fold(f64::NEG_INFINITY, f64::max);
    }
    out
}
