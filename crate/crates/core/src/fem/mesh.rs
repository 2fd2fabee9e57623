//! Simplicial meshes of convex polytopes.
//!
//! The initial mesh fans the body from its incenter over the facets (3-D
//! facets are fanned from their first vertex). Thin bodies give very flat fan
//! cells, so the fan is brought down to the target size by longest-edge
//! bisection: the globally longest edge is split at its midpoint in every
//! cell that contains it, which keeps the mesh conforming and the shape
//! regularity bounded. Further levels use uniform red refinement (4 children
//! per triangle, Bey's 8 children per tetrahedron), which nests the P1 spaces.

use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{FemError, Result};
use crate::geometry::ConvexBody;

/// Default bound on the node count of any mesh.
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

/// Node cap from the `MAKAI_NODE_CAP` environment variable, if it holds a
/// positive integer, else [`DEFAULT_NODE_CAP`].
pub fn default_node_cap() -> usize {
    std::env::var("MAKAI_NODE_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_NODE_CAP)
}

/// A conforming simplicial mesh. Nodes are stored with stride `dim`, cells
/// with stride `dim + 1`; every cell is positively oriented.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    nodes: Vec<f64>,
    cells: Vec<usize>,
    boundary: Vec<bool>,
    h_max: f64,
    level: usize,
}

/// Plain JSON shape of a mesh, for debugging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshExport {
    pub nodes: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
}

type Cell = [usize; 4];
type Point = [f64; 3];

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn distance(p: &Point, q: &Point) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

fn midpoint(p: &Point, q: &Point) -> Point {
    [
        0.5 * (p[0] + q[0]),
        0.5 * (p[1] + q[1]),
        0.5 * (p[2] + q[2]),
    ]
}

/// `d!` times the signed volume of a cell.
fn signed_det(dim: usize, pts: &[Point], cell: &Cell) -> f64 {
    let p0 = pts[cell[0]];
    let e = |k: usize| {
        let p = pts[cell[k]];
        [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]
    };
    if dim == 2 {
        let (a, b) = (e(1), e(2));
        a[0] * b[1] - a[1] * b[0]
    } else {
        let (a, b, c) = (e(1), e(2), e(3));
        a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0])
    }
}

fn orient(dim: usize, pts: &[Point], mut cell: Cell) -> Cell {
    if signed_det(dim, pts, &cell) < 0.0 {
        cell.swap(1, 2);
    }
    cell
}

fn cell_edges(dim: usize) -> &'static [(usize, usize)] {
    if dim == 2 {
        &[(0, 1), (0, 2), (1, 2)]
    } else {
        &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    }
}

/// Key into the max-heap of edges: longest first, ties broken by indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct HeapEdge {
    len_bits: u64,
    a: usize,
    b: usize,
}

impl HeapEdge {
    fn new(pts: &[Point], a: usize, b: usize) -> Self {
        let (a, b) = edge_key(a, b);
        // Nonnegative floats order like their bit patterns.
        Self {
            len_bits: distance(&pts[a], &pts[b]).to_bits(),
            a,
            b,
        }
    }

    fn len(&self) -> f64 {
        f64::from_bits(self.len_bits)
    }
}

/// Splits the longest edge until every edge is at most `h_target`.
fn bisect_longest(
    dim: usize,
    pts: &mut Vec<Point>,
    cells: &mut Vec<Cell>,
    h_target: f64,
    cap: usize,
) -> Result<()> {
    let nv = dim + 1;
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for (c, cell) in cells.iter().enumerate() {
        for &(i, j) in cell_edges(dim) {
            let key = edge_key(cell[i], cell[j]);
            let list = edges.entry(key).or_default();
            if list.is_empty() {
                heap.push(HeapEdge::new(pts, key.0, key.1));
            }
            list.push(c);
        }
    }
    while let Some(top) = heap.pop() {
        if top.len() <= h_target {
            break;
        }
        let Some(owners) = edges.remove(&(top.a, top.b)) else {
            continue;
        };
        if pts.len() + 1 > cap {
            return Err(FemError::MeshBudgetExceeded {
                nodes: pts.len() + 1,
                cap,
            });
        }
        let (a, b) = (top.a, top.b);
        let m = pts.len();
        pts.push(midpoint(&pts[a], &pts[b]));
        let mut touched: Vec<usize> = Vec::new();
        for c in owners {
            let cell = cells[c];
            let c2 = cells.len();
            let mut keep_a = cell;
            let mut keep_b = cell;
            for k in 0..nv {
                if cell[k] == b {
                    keep_a[k] = m;
                }
                if cell[k] == a {
                    keep_b[k] = m;
                }
            }
            cells[c] = keep_a;
            cells.push(keep_b);
            let others: Vec<usize> = cell[..nv]
                .iter()
                .copied()
                .filter(|&w| w != a && w != b)
                .collect();
            for &w in &others {
                let list = edges.get_mut(&edge_key(b, w)).expect("edge map out of sync");
                for owner in list.iter_mut() {
                    if *owner == c {
                        *owner = c2;
                    }
                }
                let list = edges.entry(edge_key(m, w)).or_default();
                if list.is_empty() {
                    touched.push(w);
                }
                list.push(c);
                list.push(c2);
            }
            for (x, &w1) in others.iter().enumerate() {
                for &w2 in &others[x + 1..] {
                    edges
                        .get_mut(&edge_key(w1, w2))
                        .expect("edge map out of sync")
                        .push(c2);
                }
            }
            edges.entry(edge_key(a, m)).or_default().push(c);
            edges.entry(edge_key(m, b)).or_default().push(c2);
        }
        heap.push(HeapEdge::new(pts, a, m));
        heap.push(HeapEdge::new(pts, m, b));
        for w in touched {
            heap.push(HeapEdge::new(pts, m, w));
        }
    }
    Ok(())
}

/// Meshes `body` with every edge at most `h_target`.
pub fn mesh_convex(body: &ConvexBody, h_target: f64, node_cap: usize) -> Result<Mesh> {
    let dim = body.dim();
    if !(h_target > 0.0) || !h_target.is_finite() {
        return Err(FemError::InvalidInput(format!(
            "mesh size must be positive, got {h_target}"
        )));
    }
    let lift = |p: &[f64]| -> Point { [p[0], p[1], if dim == 3 { p[2] } else { 0.0 }] };
    let mut pts: Vec<Point> = vec![lift(body.incenter())];
    pts.extend(body.vertices().iter().map(|v| lift(v)));
    let mut cells: Vec<Cell> = Vec::new();
    let floor = 1e-12 * body.diameter().powi(dim as i32);
    for facet in body.facets() {
        let fan: Vec<Cell> = if dim == 2 {
            vec![[0, facet[0] + 1, facet[1] + 1, usize::MAX]]
        } else {
            (1..facet.len() - 1)
                .map(|k| [0, facet[0] + 1, facet[k] + 1, facet[k + 1] + 1])
                .collect()
        };
        for cell in fan {
            let cell = orient(dim, &pts, cell);
            if signed_det(dim, &pts, &cell) > floor {
                cells.push(cell);
            }
        }
    }
    if pts.len() > node_cap {
        return Err(FemError::MeshBudgetExceeded {
            nodes: pts.len(),
            cap: node_cap,
        });
    }
    bisect_longest(dim, &mut pts, &mut cells, h_target, node_cap)?;
    Ok(Mesh::from_parts(dim, &pts, &cells, 0))
}

impl Mesh {
    fn from_parts(dim: usize, pts: &[Point], cells: &[Cell], level: usize) -> Self {
        let nv = dim + 1;
        let nodes: Vec<f64> = pts.iter().flat_map(|p| p[..dim].to_vec()).collect();
        let flat: Vec<usize> = cells.iter().flat_map(|c| c[..nv].to_vec()).collect();
        let mut h_max = 0.0f64;
        for cell in cells {
            for &(i, j) in cell_edges(dim) {
                h_max = h_max.max(distance(&pts[cell[i]], &pts[cell[j]]));
            }
        }
        // A face on exactly one cell lies on the boundary.
        let mut faces: HashMap<[usize; 3], u32> = HashMap::new();
        for cell in cells {
            for skip in 0..nv {
                let mut face = [usize::MAX; 3];
                let mut k = 0;
                for (x, &v) in cell[..nv].iter().enumerate() {
                    if x != skip {
                        face[k] = v;
                        k += 1;
                    }
                }
                face[..dim].sort_unstable();
                *faces.entry(face).or_insert(0) += 1;
            }
        }
        let mut boundary = vec![false; pts.len()];
        for (face, count) in faces {
            if count == 1 {
                for &v in &face[..dim] {
                    boundary[v] = true;
                }
            }
        }
        Self {
            dim,
            nodes,
            cells: flat,
            boundary,
            h_max,
            level,
        }
    }

    fn points(&self) -> Vec<Point> {
        (0..self.node_count())
            .map(|i| {
                let p = self.node(i);
                [p[0], p[1], if self.dim == 3 { p[2] } else { 0.0 }]
            })
            .collect()
    }

    fn cell_array(&self, c: usize) -> Cell {
        let mut out = [usize::MAX; 4];
        out[..=self.dim].copy_from_slice(self.cell(c));
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c * (self.dim + 1)..(c + 1) * (self.dim + 1)]
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_nodes(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&i| self.boundary[i]).collect()
    }

    /// Longest edge.
    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    /// Number of uniform refinements applied since the initial mesh.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Unsigned volume of cell `c`.
    pub fn cell_volume(&self, c: usize) -> f64 {
        let pts: Vec<&[f64]> = self.cell(c).iter().map(|&i| self.node(i)).collect();
        crate::geometry::linalg::simplex_det(&pts).abs()
            / crate::geometry::linalg::factorial(self.dim)
    }

    /// Signed volume of cell `c` (positive for every cell of a valid mesh).
    pub fn signed_cell_volume(&self, c: usize) -> f64 {
        let pts: Vec<&[f64]> = self.cell(c).iter().map(|&i| self.node(i)).collect();
        crate::geometry::linalg::simplex_det(&pts) / crate::geometry::linalg::factorial(self.dim)
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.cell_count()).map(|c| self.cell_volume(c)).sum()
    }

    pub fn export(&self) -> MeshExport {
        MeshExport {
            nodes: (0..self.node_count()).map(|i| self.node(i).to_vec()).collect(),
            cells: (0..self.cell_count()).map(|c| self.cell(c).to_vec()).collect(),
        }
    }

    /// Number of nodes after one uniform refinement.
    pub fn refined_node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for c in 0..self.cell_count() {
            let cell = self.cell(c);
            for &(i, j) in cell_edges(self.dim) {
                seen.insert(edge_key(cell[i], cell[j]));
            }
        }
        self.node_count() + seen.len()
    }

    /// One uniform red refinement: every edge is halved, so `h_max` halves
    /// and the new P1 space contains the old one.
    pub fn refined(&self, node_cap: usize) -> Result<Mesh> {
        let dim = self.dim;
        let mut pts = self.points();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |pts: &mut Vec<Point>, a: usize, b: usize| -> usize {
            *mids.entry(edge_key(a, b)).or_insert_with(|| {
                pts.push(midpoint(&pts[a], &pts[b]));
                pts.len() - 1
            })
        };
        let total = self.refined_node_count();
        if total > node_cap {
            return Err(FemError::MeshBudgetExceeded {
                nodes: total,
                cap: node_cap,
            });
        }
        let mut cells: Vec<Cell> = Vec::with_capacity(self.cell_count() << dim);
        const X: usize = usize::MAX;
        for c in 0..self.cell_count() {
            let v = self.cell_array(c);
            if dim == 2 {
                let m01 = mid(&mut pts, v[0], v[1]);
                let m02 = mid(&mut pts, v[0], v[2]);
                let m12 = mid(&mut pts, v[1], v[2]);
                cells.push([v[0], m01, m02, X]);
                cells.push([m01, v[1], m12, X]);
                cells.push([m02, m12, v[2], X]);
                cells.push([m01, m12, m02, X]);
            } else {
                let m01 = mid(&mut pts, v[0], v[1]);
                let m02 = mid(&mut pts, v[0], v[2]);
                let m03 = mid(&mut pts, v[0], v[3]);
                let m12 = mid(&mut pts, v[1], v[2]);
                let m13 = mid(&mut pts, v[1], v[3]);
                let m23 = mid(&mut pts, v[2], v[3]);
                cells.push([v[0], m01, m02, m03]);
                cells.push([m01, v[1], m12, m13]);
                cells.push([m02, m12, v[2], m23]);
                cells.push([m03, m13, m23, v[3]]);
                // Octahedron: split along its shortest diagonal; the other
                // four vertices form a cycle around it.
                let diagonals = [
                    (m01, m23, [m02, m03, m13, m12]),
                    (m02, m13, [m01, m03, m23, m12]),
                    (m03, m12, [m01, m02, m23, m13]),
                ];
                let (p, q, ring) = diagonals
                    .iter()
                    .min_by(|x, y| {
                        distance(&pts[x.0], &pts[x.1]).total_cmp(&distance(&pts[y.0], &pts[y.1]))
                    })
                    .copied()
                    .unwrap();
                for k in 0..4 {
                    cells.push(orient(3, &pts, [p, q, ring[k], ring[(k + 1) % 4]]));
                }
            }
        }
        let mut out = Mesh::from_parts(dim, &pts, &cells, self.level + 1);
        // Red refinement halves every edge exactly.
        out.h_max = out.h_max.min(0.5 * self.h_max);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBody;

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

    fn check_valid(mesh: &Mesh, volume: f64) {
        for c in 0..mesh.cell_count() {
            assert!(mesh.signed_cell_volume(c) > 0.0, "cell {c} not positive");
        }
        assert!((mesh.total_volume() - volume).abs() < 1e-12 * volume.max(1.0));
    }

    #[test]
    fn square_fan_and_red_refinement() {
        let m = mesh_convex(&square(), 1.0, DEFAULT_NODE_CAP).unwrap();
        assert_eq!(m.cell_count(), 4);
        assert_eq!(m.node_count(), 5);
        assert_eq!(m.boundary_nodes(), vec![1, 2, 3, 4]);
        check_valid(&m, 1.0);
        let r = m.refined(DEFAULT_NODE_CAP).unwrap();
        assert_eq!(r.cell_count(), 16);
        assert_eq!(r.node_count(), 13);
        assert!((r.h_max() - 0.5 * m.h_max()).abs() < 1e-15);
        assert_eq!(r.boundary_nodes().len(), 8);
        check_valid(&r, 1.0);
    }

    #[test]
    fn bisection_reaches_target_on_thin_triangle() {
        let body = ConvexBody::from_vertices(
            2,
            vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.02]],
        )
        .unwrap();
        let m = mesh_convex(&body, 0.005, DEFAULT_NODE_CAP).unwrap();
        assert!(m.h_max() <= 0.005);
        check_valid(&m, 0.02);
        let min_angle_sine = (0..m.cell_count())
            .map(|c| {
                let v: Vec<&[f64]> = m.cell(c).iter().map(|&i| m.node(i)).collect();
                let area2 = 2.0 * m.cell_volume(c);
                let l = |a: &[f64], b: &[f64]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
                let (a, b, cc) = (l(v[0], v[1]), l(v[1], v[2]), l(v[0], v[2]));
                area2 / (a * b).max(b * cc).max(a * cc)
            })
            .fold(1.0f64, f64::min);
        // Bisecting longest edges at most halves the smallest angle, and the
        // body itself has corner angles of about 0.02.
        assert!(min_angle_sine > 0.4 * 0.02, "degenerate angles: {min_angle_sine}");
    }

    #[test]
    fn cube_mesh_covers_exactly() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        let body = ConvexBody::from_vertices(3, pts).unwrap();
        let m = mesh_convex(&body, 0.3, DEFAULT_NODE_CAP).unwrap();
        assert!(m.h_max() <= 0.3);
        check_valid(&m, 1.0);
        let r = m.refined(DEFAULT_NODE_CAP).unwrap();
        assert_eq!(r.cell_count(), 8 * m.cell_count());
        check_valid(&r, 1.0);
        for i in r.boundary_nodes() {
            let p = r.node(i);
            let d = p.iter().map(|x| x.min(1.0 - x)).fold(f64::INFINITY, f64::min);
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn node_cap_is_enforced() {
        let err = mesh_convex(&square(), 0.01, 100).unwrap_err();
        assert!(matches!(err, FemError::MeshBudgetExceeded { cap: 100, .. }));
        let m = mesh_convex(&square(), 1.0, 100).unwrap();
        assert!(matches!(
            m.refined(6),
            Err(FemError::MeshBudgetExceeded { nodes: 13, cap: 6 })
        ));
    }
}
