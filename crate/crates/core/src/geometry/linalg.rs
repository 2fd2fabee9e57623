//! Small dense vector helpers for points in R² and R³.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    let mut c = vec![0.0; dim];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    let inv = 1.0 / points.len() as f64;
    c.iter_mut().for_each(|x| *x *= inv);
    c
}

/// Determinant of the `d × d` matrix whose rows are `rows` (d ≤ 3).
pub fn det(rows: &[&[f64]]) -> f64 {
    match rows.len() {
        1 => rows[0][0],
        2 => rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
        3 => {
            let (a, b, c) = (rows[0], rows[1], rows[2]);
            a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0])
        }
        d => panic!("det: unsupported size {d}"),
    }
}

/// Signed volume of the simplex `points[0..=d]` times `d!`.
pub fn simplex_det(points: &[&[f64]]) -> f64 {
    let base = points[0];
    let edges: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, base)).collect();
    let rows: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
    det(&rows)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Solves the square system `m x = rhs` by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular.
pub fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-13 * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

/// Orthonormal basis `(u, v)` of the plane orthogonal to the unit vector `a`,
/// oriented so that `u × v = a`.
pub fn plane_basis(a: &[f64]) -> ([f64; 3], [f64; 3]) {
    let helper = if a[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let u = cross(&helper, a);
    let nu = norm(&u);
    let u = [u[0] / nu, u[1] / nu, u[2] / nu];
    let v = cross(a, &u);
    (u, v)
}

/// Affine rank of a point set (0 for a single point), with tolerance `tol`
/// on the residual lengths used by Gram–Schmidt.
pub fn affine_rank(points: &[Vec<f64>], tol: f64) -> usize {
    if points.is_empty() {
        return 0;
    }
    let base = &points[0];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in &points[1..] {
        let mut r = sub(p, base);
        for b in &basis {
            let c = dot(&r, b);
            r = sub(&r, &scale(b, c));
        }
        let nr = norm(&r);
        if nr > tol {
            basis.push(scale(&r, 1.0 / nr));
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let m = vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ];
        let x = solve(m, vec![3.0, 5.0, 5.0]).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(m, vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn plane_basis_is_right_handed() {
        let a = [0.0, 0.6, 0.8];
        let (u, v) = plane_basis(&a);
        let w = cross(&u, &v);
        for k in 0..3 {
            assert!((w[k] - a[k]).abs() < 1e-15);
        }
        assert!(dot(&u, &a).abs() < 1e-15 && dot(&v, &a).abs() < 1e-15);
    }

    #[test]
    fn affine_rank_of_collinear_points() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![3.0, 3.0]];
        assert_eq!(affine_rank(&pts, 1e-12), 1);
    }
}
