//! Dense two-phase simplex for small linear programs.
//!
//! Solves `maximize cᵀx subject to A x ≤ b` with `x` free. Free variables are
//! split as `x = p − q` with `p, q ≥ 0`; rows with a negative right-hand side
//! receive an artificial variable for phase I. Pivoting follows Bland's rule,
//! which guarantees termination on degenerate problems. Problem sizes here are
//! a few dozen rows, so a dense tableau is fine.

const PIVOT_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, col: usize, obj: &mut [f64]) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = obj[col];
        if f != 0.0 {
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            obj[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Reduced costs `c_j − c_Bᵀ B⁻¹ A_j` for the current basis; the last
    /// entry holds `−c_Bᵀ B⁻¹ b`.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut obj: Vec<f64> = cost.to_vec();
        obj.push(0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
        obj
    }

    /// Runs simplex iterations; `allowed(j)` filters entering columns.
    /// Returns false when the objective is unbounded.
    fn optimize(&mut self, obj: &mut [f64], allowed: impl Fn(usize) -> bool) -> bool {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.ncols).find(|&j| allowed(j) && obj[j] > PIVOT_EPS);
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    best = match best {
                        None => Some((ratio, i)),
                        Some((br, bi)) => {
                            if ratio < br - 1e-14 * br.abs().max(1.0)
                                || (ratio <= br + 1e-14 * br.abs().max(1.0)
                                    && self.basis[i] < self.basis[bi])
                            {
                                Some((ratio, i))
                            } else {
                                Some((br, bi))
                            }
                        }
                    };
                }
            }
            match best {
                None => return false,
                Some((_, r)) => self.pivot(r, col, obj),
            }
        }
        // Bland's rule cannot cycle; hitting the cap means numerical trouble.
        true
    }
}

/// Maximizes `c·x` subject to `a[i]·x ≤ b[i]`.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    let n_art = b.iter().filter(|&&bi| bi < 0.0).count();
    let slack0 = 2 * n;
    let art0 = 2 * n + m;
    let ncols = art0 + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art0;
    for i in 0..m {
        let mut row = vec![0.0; ncols + 1];
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * a[i][j];
            row[n + j] = -sign * a[i][j];
        }
        row[slack0 + i] = sign;
        row[ncols] = sign * b[i];
        if b[i] < 0.0 {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack0 + i);
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, ncols };

    if n_art > 0 {
        let mut cost1 = vec![0.0; ncols];
        cost1[art0..].iter_mut().for_each(|c| *c = -1.0);
        let mut obj = tab.reduced_costs(&cost1);
        tab.optimize(&mut obj, |_| true);
        let infeas: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= art0)
            .map(|i| tab.rhs(i))
            .sum();
        let scale = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        if infeas > 1e-9 * scale {
            return LpOutcome::Infeasible;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= art0 {
                if let Some(col) = (0..art0).find(|&j| tab.rows[i][j].abs() > PIVOT_EPS) {
                    let mut dummy = vec![0.0; ncols + 1];
                    tab.pivot(i, col, &mut dummy);
                }
            }
        }
    }

    let mut cost2 = vec![0.0; ncols];
    for j in 0..n {
        cost2[j] = c[j];
        cost2[n + j] = -c[j];
    }
    let mut obj = tab.reduced_costs(&cost2);
    if !tab.optimize(&mut obj, |j| j < art0) {
        return LpOutcome::Unbounded;
    }

    let mut vals = vec![0.0; ncols];
    for (i, &bv) in tab.basis.iter().enumerate() {
        vals[bv] = tab.rhs(i);
    }
    let x: Vec<f64> = (0..n).map(|j| vals[j] - vals[n + j]).collect();
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

/// Chebyshev center of `{x : a_i·x ≤ b_i}` for unit normals `a_i`:
/// maximizes `r` subject to `a_i·x + r ≤ b_i`. Returns `(center, radius)`.
pub fn chebyshev_center(normals: &[Vec<f64>], offsets: &[f64]) -> LpOutcome {
    let dim = normals.first().map_or(0, |a| a.len());
    let rows: Vec<Vec<f64>> = normals
        .iter()
        .map(|a| {
            let mut r = a.clone();
            r.push(1.0);
            r
        })
        .collect();
    let mut c = vec![0.0; dim];
    c.push(1.0);
    maximize(&c, &rows, offsets)
}
