//! P1 stiffness assembly, Jacobi-preconditioned conjugate gradients and the
//! refinement ladder with Richardson extrapolation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{default_node_cap, mesh_convex, Mesh};
use super::{FemError, Result};
use crate::geometry::linalg::solve;
use crate::geometry::ConvexBody;

/// Compressed sparse rows over the interior nodes; boundary rows are the
/// identity so the system keeps the full node numbering.
struct Csr {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().with_min_len(4096).enumerate().for_each(|(i, yi)| {
            let (s, e) = (self.offsets[i], self.offsets[i + 1]);
            *yi = self.cols[s..e]
                .iter()
                .zip(&self.vals[s..e])
                .map(|(&j, &v)| v * x[j])
                .sum();
        });
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.offsets.len() - 1)
            .map(|i| {
                let (s, e) = (self.offsets[i], self.offsets[i + 1]);
                let k = self.cols[s..e].binary_search(&i).expect("missing diagonal");
                self.vals[s + k]
            })
            .collect()
    }
}

/// Gradients of the barycentric coordinates and the volume of cell `c`.
fn cell_gradients(mesh: &Mesh, c: usize) -> (Vec<Vec<f64>>, f64) {
    let dim = mesh.dim();
    let cell = mesh.cell(c);
    let x0 = mesh.node(cell[0]);
    // Rows of J are the edge vectors x_k − x_0; grad λ_k solves J g = e_k.
    let jac: Vec<Vec<f64>> = (1..=dim)
        .map(|k| mesh.node(cell[k]).iter().zip(x0).map(|(a, b)| a - b).collect())
        .collect();
    let mut grads = vec![vec![0.0; dim]; dim + 1];
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        grads[k + 1] = solve(jac.clone(), e).expect("degenerate mesh cell");
    }
    for k in 0..dim {
        grads[0][k] = -(1..=dim).map(|j| grads[j][k]).sum::<f64>();
    }
    (grads, mesh.cell_volume(c))
}

/// Node-to-cell incidence in CSR form.
fn incidence(mesh: &Mesh) -> (Vec<usize>, Vec<usize>) {
    let n = mesh.node_count();
    let mut counts = vec![0usize; n + 1];
    for c in 0..mesh.cell_count() {
        for &v in mesh.cell(c) {
            counts[v + 1] += 1;
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let mut fill = counts.clone();
    let mut list = vec![0usize; counts[n]];
    for c in 0..mesh.cell_count() {
        for &v in mesh.cell(c) {
            list[fill[v]] = c;
            fill[v] += 1;
        }
    }
    (counts, list)
}

fn assemble(mesh: &Mesh) -> (Csr, Vec<f64>) {
    let n = mesh.node_count();
    let nv = mesh.dim() + 1;
    let (starts, list) = incidence(mesh);
    let rows: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            if mesh.is_boundary(i) {
                return (vec![i], vec![1.0]);
            }
            let owners = &list[starts[i]..starts[i + 1]];
            let mut cols: Vec<usize> = owners
                .iter()
                .flat_map(|&c| mesh.cell(c).iter().copied())
                .filter(|&j| !mesh.is_boundary(j))
                .collect();
            cols.sort_unstable();
            cols.dedup();
            let mut vals = vec![0.0; cols.len()];
            for &c in owners {
                let cell = mesh.cell(c);
                let li = cell.iter().position(|&v| v == i).unwrap();
                let (grads, vol) = cell_gradients(mesh, c);
                for lj in 0..nv {
                    let j = cell[lj];
                    if mesh.is_boundary(j) {
                        continue;
                    }
                    let k = cols.binary_search(&j).unwrap();
                    vals[k] += vol
                        * grads[li]
                            .iter()
                            .zip(&grads[lj])
                            .map(|(a, b)| a * b)
                            .sum::<f64>();
                }
            }
            (cols, vals)
        })
        .collect();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for (c, v) in rows {
        cols.extend(c);
        vals.extend(v);
        offsets.push(cols.len());
    }
    // Load vector: ∫φ_i = Σ_{cells ∋ i} |cell|/(n+1).
    let mut load = vec![0.0; n];
    let share = 1.0 / nv as f64;
    for c in 0..mesh.cell_count() {
        let w = mesh.cell_volume(c) * share;
        for &v in mesh.cell(c) {
            load[v] += w;
        }
    }
    (Csr { offsets, cols, vals }, load)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct CgOutcome {
    x: Vec<f64>,
    iterations: usize,
    residual: f64,
}

fn conjugate_gradients(a: &Csr, b: &[f64], tol: f64) -> Result<CgOutcome> {
    let n = b.len();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let max_iter = 1000 + 10 * n;
    let mut best = f64::INFINITY;
    let mut since_best = 0usize;
    for it in 1..=max_iter {
        a.mul_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Err(FemError::SolverDiverged {
                iterations: it,
                residual: dot(&r, &r).sqrt() / bnorm,
            });
        }
        let alpha = rz / pq;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        let res = dot(&r, &r).sqrt() / bnorm;
        if !res.is_finite() {
            return Err(FemError::SolverDiverged {
                iterations: it,
                residual: res,
            });
        }
        if res <= tol {
            return Ok(CgOutcome {
                x,
                iterations: it,
                residual: res,
            });
        }
        if res < 0.5 * best {
            best = res;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best > 2000 + n {
                return Err(FemError::SolverDiverged {
                    iterations: it,
                    residual: res,
                });
            }
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(FemError::SolverDiverged {
        iterations: max_iter,
        residual: dot(&r, &r).sqrt() / bnorm,
    })
}

/// Discrete torsion function on one mesh.
#[derive(Debug, Clone)]
pub struct TorsionSolution {
    /// Nodal values, zero on boundary nodes.
    pub u: Vec<f64>,
    /// `(∫u_h)²/∫|∇u_h|²`: a lower bound for `T(Ω)`.
    pub t_h: f64,
    /// `∫u_h` (the load pairing `b·u`).
    pub load_value: f64,
    /// `∫|∇u_h|²` (`uᵀKu`).
    pub energy: f64,
    /// Final relative CG residual.
    pub residual: f64,
    pub iterations: usize,
    pub refinement_level: usize,
    pub h_max: f64,
    pub nodes: usize,
    pub cells: usize,
}

impl TorsionSolution {
    /// Relative gap in the energy identity `b·u = uᵀKu`.
    pub fn energy_gap(&self) -> f64 {
        (self.load_value - self.energy).abs() / self.load_value.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn solve_torsion(mesh: &Mesh, cg_tol: f64) -> Result<TorsionSolution> {
    if !(cg_tol > 0.0 && cg_tol <= 1e-4) {
        return Err(FemError::InvalidInput(format!(
            "CG tolerance must lie in (0, 1e-4], got {cg_tol}"
        )));
    }
    let (k, load) = assemble(mesh);
    let rhs: Vec<f64> = load
        .iter()
        .enumerate()
        .map(|(i, &b)| if mesh.is_boundary(i) { 0.0 } else { b })
        .collect();
    let cg = conjugate_gradients(&k, &rhs, cg_tol)?;
    let mut ku = vec![0.0; rhs.len()];
    k.mul_into(&cg.x, &mut ku);
    let load_value = dot(&rhs, &cg.x);
    let energy = dot(&cg.x, &ku);
    let t_h = if energy > 0.0 {
        load_value * load_value / energy
    } else {
        0.0
    };
    Ok(TorsionSolution {
        u: cg.x,
        t_h,
        load_value,
        energy,
        residual: cg.residual,
        iterations: cg.iterations,
        refinement_level: mesh.level(),
        h_max: mesh.h_max(),
        nodes: mesh.node_count(),
        cells: mesh.cell_count(),
    })
}

/// Mesh and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Initial mesh size; `None` picks [`auto_mesh`].
    pub mesh_h: Option<f64>,
    /// Uniform refinements after the initial mesh; `None` picks the default
    /// for the dimension.
    pub refinements: Option<usize>,
    pub cg_tol: f64,
    pub node_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mesh_h: None,
            refinements: None,
            cg_tol: 1e-10,
            node_cap: default_node_cap(),
        }
    }
}

/// Default initial mesh size and refinement count: `min(diam/40, w/8)` with
/// two refinements in the plane, `min(diam/12, w/4)` with one in space.
pub fn auto_mesh(body: &ConvexBody, width: f64) -> (f64, usize) {
    match body.dim() {
        2 => ((body.diameter() / 40.0).min(width / 8.0), 2),
        _ => ((body.diameter() / 12.0).min(width / 4.0), 1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: usize,
    pub h_max: f64,
    pub nodes: usize,
    pub cells: usize,
    pub t_h: f64,
    pub residual: f64,
    pub iterations: usize,
    pub energy_gap: f64,
}

impl From<&TorsionSolution> for LevelResult {
    fn from(s: &TorsionSolution) -> Self {
        Self {
            level: s.refinement_level,
            h_max: s.h_max,
            nodes: s.nodes,
            cells: s.cells,
            t_h: s.t_h,
            residual: s.residual,
            iterations: s.iterations,
            energy_gap: s.energy_gap(),
        }
    }
}

/// Torsion on a sequence of nested meshes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionLadder {
    pub levels: Vec<LevelResult>,
    /// Finest-level value: a certified lower bound for `T(Ω)`.
    pub t_lower: f64,
    /// `(4T_fine − T_coarse)/3`, or `t_lower` with a single level.
    pub t_extrapolated: f64,
    /// `|t_extrapolated − t_lower|` (zero with a single level).
    pub t_error: f64,
    /// Whether every refinement step increased `T_h`.
    pub monotone: bool,
}

impl TorsionLadder {
    fn from_levels(levels: Vec<LevelResult>) -> Self {
        let fine = levels.last().expect("at least one level").t_h;
        let (t_extrapolated, t_error) = if levels.len() >= 2 {
            let coarse = levels[levels.len() - 2].t_h;
            let rich = (4.0 * fine - coarse) / 3.0;
            (rich, (rich - fine).abs())
        } else {
            (fine, 0.0)
        };
        let monotone = levels.windows(2).all(|w| w[1].t_h >= w[0].t_h);
        Self {
            levels,
            t_lower: fine,
            t_extrapolated,
            t_error,
            monotone,
        }
    }

    /// Observed convergence orders `log₂((T − T_k)/(T − T_{k+1}))` against a
    /// reference value.
    pub fn convergence_orders(&self, reference: f64) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| ((reference - w[0].t_h) / (reference - w[1].t_h)).log2())
            .collect()
    }
}

/// Meshes at `h0` and solves on `refinements + 1` nested levels.
pub fn torsion_ladder_with(
    body: &ConvexBody,
    h0: f64,
    refinements: usize,
    cg_tol: f64,
    node_cap: usize,
) -> Result<TorsionLadder> {
    let mut mesh = mesh_convex(body, h0, node_cap)?;
    let mut levels = Vec::with_capacity(refinements + 1);
    for k in 0..=refinements {
        levels.push(LevelResult::from(&solve_torsion(&mesh, cg_tol)?));
        if k < refinements {
            mesh = mesh.refined(node_cap)?;
        }
    }
    Ok(TorsionLadder::from_levels(levels))
}

/// Ladder with settings from `config`; `width` feeds the automatic mesh size.
pub fn torsion_ladder(body: &ConvexBody, width: f64, config: &SolverConfig) -> Result<TorsionLadder> {
    let (auto_h, auto_refine) = auto_mesh(body, width);
    torsion_ladder_with(
        body,
        config.mesh_h.unwrap_or(auto_h),
        config.refinements.unwrap_or(auto_refine),
        config.cg_tol,
        config.node_cap,
    )
}

#[cfg(test)]
fn gradient_sum(mesh: &Mesh, c: usize) -> f64 {
    let (g, vol) = cell_gradients(mesh, c);
    (0..mesh.dim())
        .map(|k| g.iter().map(|gi| gi[k]).sum::<f64>().abs())
        .sum::<f64>()
        * vol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::DEFAULT_NODE_CAP;

    fn square() -> ConvexBody {
        ConvexBody::from_vertices(
            2,
            vec![
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn gradients_sum_to_zero() {
        let m = mesh_convex(&square(), 0.3, DEFAULT_NODE_CAP).unwrap();
        for c in 0..m.cell_count() {
            assert!(gradient_sum(&m, c) < 1e-12);
        }
    }

    #[test]
    fn stiffness_rows_sum_to_zero_without_boundary() {
        // With no boundary elimination the P1 stiffness annihilates constants.
        let m = mesh_convex(&square(), 0.5, DEFAULT_NODE_CAP).unwrap();
        let mut sums = vec![0.0; m.node_count()];
        for c in 0..m.cell_count() {
            let (g, vol) = cell_gradients(&m, c);
            let cell = m.cell(c);
            for i in 0..3 {
                for j in 0..3 {
                    sums[cell[i]] += vol * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        assert!(sums.iter().all(|s| s.abs() < 1e-13));
    }

    #[test]
    fn single_interior_node() {
        // Fan of the unit square: one interior node at the center. Each of the
        // four cells contributes 1 to the diagonal, load is 4·(1/4)/3.
        let m = mesh_convex(&square(), 1.0, DEFAULT_NODE_CAP).unwrap();
        let s = solve_torsion(&m, 1e-12).unwrap();
        let b = 1.0 / 3.0;
        let k = 4.0;
        assert!((s.t_h - b * b / k).abs() < 1e-15);
        assert!((s.u[0] - b / k).abs() < 1e-15);
        assert!(s.u[1..].iter().all(|&u| u == 0.0));
    }

    #[test]
    fn ladder_increases_on_square() {
        let ladder = torsion_ladder_with(&square(), 0.25, 2, 1e-10, DEFAULT_NODE_CAP).unwrap();
        assert!(ladder.monotone);
        assert_eq!(ladder.levels.len(), 3);
        assert!(ladder.t_lower < 0.0351442);
        assert!(ladder.levels.iter().all(|l| l.energy_gap < 1e-8));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let m = mesh_convex(&square(), 1.0, DEFAULT_NODE_CAP).unwrap();
        assert!(matches!(
            solve_torsion(&m, 0.1),
            Err(FemError::InvalidInput(_))
        ));
    }
}
