use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cells::{facet_cells, volume_and_perimeter, FacetCell, Halfspace};
use super::linalg::{dist, dot, norm};
use super::lp::{chebyshev_center, maximize, LpOutcome};
use super::{hull, GeometryError, Result, EPS_GEOM_REL};

/// Where a body came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Explicit,
    Family {
        name: String,
        params: BTreeMap<String, f64>,
    },
}

/// A bounded convex polytope with nonempty interior, kept in both halfspace
/// and vertex form.
///
/// Normals are unit length and every listed halfspace supports a facet of
/// positive (n−1)-measure. `facets[i]` lists the vertices of facet `i`: the two
/// endpoints in counter-clockwise order for n = 2, the boundary cycle
/// (counter-clockwise seen from outside) for n = 3.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Vec<usize>>,
    facet_measures: Vec<f64>,
    provenance: Provenance,
    volume: f64,
    perimeter: f64,
    inradius: f64,
    incenter: Vec<f64>,
    diameter: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn check_dim(dim: usize) -> Result<()> {
    if (2..=3).contains(&dim) {
        Ok(())
    } else {
        Err(GeometryError::DimensionUnsupported { dim })
    }
}

/// Normalizes normals and merges parallel duplicates, keeping the tighter offset.
fn normalize_halfspaces(dim: usize, input: Vec<Halfspace>) -> Result<Vec<Halfspace>> {
    let mut out: Vec<Halfspace> = Vec::with_capacity(input.len());
    for h in input {
        if h.normal.len() != dim {
            return Err(GeometryError::InvalidInput(format!(
                "normal of length {} in dimension {dim}",
                h.normal.len()
            )));
        }
        if !h.offset.is_finite() || h.normal.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidInput("non-finite halfspace".into()));
        }
        let len = norm(&h.normal);
        if len == 0.0 {
            return Err(GeometryError::InvalidInput("zero normal".into()));
        }
        let normal: Vec<f64> = h.normal.iter().map(|v| v / len).collect();
        let offset = h.offset / len;
        match out.iter_mut().find(|o| dist(&o.normal, &normal) <= 1e-12) {
            Some(o) => o.offset = o.offset.min(offset),
            None => out.push(Halfspace { normal, offset }),
        }
    }
    Ok(out)
}

impl ConvexBody {
    /// Builds a body from halfspaces `a·x ≤ b` (normals need not be unit).
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        check_dim(dim)?;
        if halfspaces.is_empty() {
            return Err(GeometryError::InvalidInput("no halfspaces".into()));
        }
        let hs = normalize_halfspaces(dim, halfspaces)?;
        let normals: Vec<Vec<f64>> = hs.iter().map(|h| h.normal.clone()).collect();
        let offsets: Vec<f64> = hs.iter().map(|h| h.offset).collect();

        let (incenter, inradius) = match chebyshev_center(&normals, &offsets) {
            LpOutcome::Optimal { x, value } => (x[..dim].to_vec(), value),
            LpOutcome::Unbounded => return Err(GeometryError::Unbounded),
            LpOutcome::Infeasible => {
                return Err(GeometryError::DegenerateBody("empty intersection".into()))
            }
        };
        let mut lo = vec![0.0; dim];
        let mut hi = vec![0.0; dim];
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; dim];
                c[k] = sign;
                match maximize(&c, &normals, &offsets) {
                    LpOutcome::Optimal { value, .. } => {
                        if sign > 0.0 {
                            hi[k] = value;
                        } else {
                            lo[k] = -value;
                        }
                    }
                    LpOutcome::Unbounded => return Err(GeometryError::Unbounded),
                    LpOutcome::Infeasible => {
                        return Err(GeometryError::DegenerateBody("empty intersection".into()))
                    }
                }
            }
        }
        let extent = dist(&lo, &hi);
        if inradius <= EPS_GEOM_REL * extent {
            return Err(GeometryError::DegenerateBody(format!(
                "interior is empty (Chebyshev radius {inradius:e})"
            )));
        }
        Self::assemble(dim, hs, lo, hi, incenter, inradius, Provenance::Explicit)
    }

    /// Builds the convex hull of a point cloud.
    pub fn from_vertices(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(GeometryError::InvalidInput("no vertices".into()));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(GeometryError::InvalidInput(format!(
                "vertex coordinates do not match dimension {dim}"
            )));
        }
        if points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidInput("non-finite vertex".into()));
        }
        let hs = hull::supporting_halfspaces(dim, &points)?;
        Self::from_halfspaces(dim, hs)
    }

    /// Completes the dual representation from irredundant-or-not halfspaces
    /// with a known bounding box and Chebyshev center.
    fn assemble(
        dim: usize,
        hs: Vec<Halfspace>,
        lo: Vec<f64>,
        hi: Vec<f64>,
        incenter: Vec<f64>,
        inradius: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        let extent = dist(&lo, &hi);
        let tol = EPS_GEOM_REL * extent;
        let pad = 1e-6 * extent + tol;
        let blo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
        let bhi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
        let cells = facet_cells(&hs, &blo, &bhi, tol);

        let mut halfspaces = Vec::new();
        let mut kept: Vec<FacetCell> = Vec::new();
        for (h, c) in hs.into_iter().zip(cells) {
            if let Some(c) = c {
                halfspaces.push(h);
                kept.push(c);
            }
        }
        if halfspaces.len() < dim + 1 {
            return Err(GeometryError::DegenerateBody(
                "fewer than n+1 facets".into(),
            ));
        }

        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let mut facets = Vec::with_capacity(kept.len());
        for cell in &kept {
            let mut ids: Vec<usize> = Vec::with_capacity(cell.points.len());
            for p in &cell.points {
                let id = match vertices.iter().position(|v| dist(v, p) <= tol) {
                    Some(id) => id,
                    None => {
                        vertices.push(p.clone());
                        vertices.len() - 1
                    }
                };
                if ids.last() != Some(&id) {
                    ids.push(id);
                }
            }
            while ids.len() > 1 && ids.first() == ids.last() {
                ids.pop();
            }
            facets.push(ids);
        }
        if facets.iter().any(|f| f.len() < dim) {
            return Err(GeometryError::DegenerateBody("collapsed facet".into()));
        }

        let cells: Vec<Option<FacetCell>> = kept.into_iter().map(Some).collect();
        let (volume, perimeter) = volume_and_perimeter(&halfspaces, &cells, &incenter);
        let facet_measures = cells.iter().flatten().map(|c| c.measure).collect();
        let diameter = diameter_of(&vertices);
        if volume <= 0.0 {
            return Err(GeometryError::DegenerateBody("zero volume".into()));
        }
        Ok(Self {
            dim,
            halfspaces,
            vertices,
            facets,
            facet_measures,
            provenance,
            volume,
            perimeter,
            inradius,
            incenter,
            diameter,
            lo,
            hi,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// (n−1)-measure of each facet, aligned with [`Self::halfspaces`].
    pub fn facet_measures(&self) -> &[f64] {
        &self.facet_measures
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn incenter(&self) -> &[f64] {
        &self.incenter
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// Absolute geometric tolerance for this body.
    pub fn eps_geom(&self) -> f64 {
        EPS_GEOM_REL * self.diameter
    }

    /// `h(y) = max_{x ∈ Ω} x·y`.
    pub fn support_value(&self, direction: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, direction))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Width in direction `u` (unit): `h(u) + h(−u)`.
    pub fn width_in(&self, u: &[f64]) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            let s = dot(v, u);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        hi - lo
    }

    /// Distance from `x` to the boundary, `min_i (b_i − a_i·x)`.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        let d = self.facet_distance(x);
        if d < -self.eps_geom() {
            return Err(GeometryError::OutsideBody { violation: -d });
        }
        Ok(d.max(0.0))
    }

    /// `min_i (b_i − a_i·x)` without the inside check (negative outside).
    pub(crate) fn facet_distance(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Inner parallel body `{x : d(x, ∂Ω) > t}` as a polytope.
    pub fn erode(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(GeometryError::InvalidInput(format!(
                "erosion depth must be nonnegative, got {t}"
            )));
        }
        if t >= self.inradius - self.eps_geom() {
            return Err(GeometryError::EmptyErosion {
                t,
                inradius: self.inradius,
            });
        }
        let hs = self
            .halfspaces
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), h.offset - t))
            .collect();
        Self::assemble(
            self.dim,
            hs,
            self.lo.clone(),
            self.hi.clone(),
            self.incenter.clone(),
            self.inradius - t,
            self.provenance.clone(),
        )
    }

    /// Volume and perimeter of the inner parallel set at depth `t`, without
    /// building a validated body. Valid up to and including `t = R_Ω`, where
    /// the set degenerates.
    pub fn eroded_measures(&self, t: f64) -> (f64, f64) {
        // Work relative to the incenter, where the inner parallel bodies
        // shrink to a point as t → R.
        let c = &self.incenter;
        let hs: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .map(|h| {
                let nc: f64 = h.normal.iter().zip(c).map(|(a, b)| a * b).sum();
                Halfspace::new(h.normal.clone(), (h.offset - nc) - t)
            })
            .collect();
        let mut blo: Vec<f64> = self.lo.iter().zip(c).map(|(v, ci)| v - ci).collect();
        let mut bhi: Vec<f64> = self.hi.iter().zip(c).map(|(v, ci)| v - ci).collect();
        let origin = vec![0.0; self.dim];
        // Clipping a large box down to a tiny polytope loses relative
        // accuracy, so re-clip inside the box of the previous result until
        // the box is tight.
        for _ in 0..6 {
            let extent = dist(&blo, &bhi);
            let pad = 1e-6 * extent;
            let lo: Vec<f64> = blo.iter().map(|v| v - pad).collect();
            let hi: Vec<f64> = bhi.iter().map(|v| v + pad).collect();
            let cells = facet_cells(&hs, &lo, &hi, 1e-14 * extent);
            let points = cells.iter().flatten().flat_map(|cell| cell.points.iter());
            let (mut plo, mut phi) = (vec![f64::INFINITY; self.dim], vec![f64::NEG_INFINITY; self.dim]);
            for p in points {
                for k in 0..self.dim {
                    plo[k] = plo[k].min(p[k]);
                    phi[k] = phi[k].max(p[k]);
                }
            }
            let size = dist(&plo, &phi);
            if plo[0] > phi[0] || size > 1e-2 * extent {
                let (v, p) = volume_and_perimeter(&hs, &cells, &origin);
                return (v.max(0.0), p);
            }
            // The previous pass is only accurate to ~1e-14 of its box, so
            // keep a generous margin around its result.
            let margin = size + 1e-12 * extent;
            blo = plo.iter().map(|v| v - margin).collect();
            bhi = phi.iter().map(|v| v + margin).collect();
        }
        let extent = dist(&blo, &bhi);
        let pad = 1e-6 * extent;
        let lo: Vec<f64> = blo.iter().map(|v| v - pad).collect();
        let hi: Vec<f64> = bhi.iter().map(|v| v + pad).collect();
        let cells = facet_cells(&hs, &lo, &hi, 1e-14 * extent);
        let (v, p) = volume_and_perimeter(&hs, &cells, &origin);
        (v.max(0.0), p)
    }

    /// The homothetic copy `s·Ω` (s > 0).
    pub fn scaled(&self, s: f64) -> Self {
        assert!(s > 0.0, "scale factor must be positive");
        let n = self.dim as i32;
        let scale_vec = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<_>>();
        Self {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), h.offset * s))
                .collect(),
            vertices: self.vertices.iter().map(|v| scale_vec(v)).collect(),
            facets: self.facets.clone(),
            facet_measures: self
                .facet_measures
                .iter()
                .map(|m| m * s.powi(n - 1))
                .collect(),
            provenance: self.provenance.clone(),
            volume: self.volume * s.powi(n),
            perimeter: self.perimeter * s.powi(n - 1),
            inradius: self.inradius * s,
            incenter: scale_vec(&self.incenter),
            diameter: self.diameter * s,
            lo: scale_vec(&self.lo),
            hi: scale_vec(&self.hi),
        }
    }

    /// The translate `Ω + v`.
    pub fn translated(&self, v: &[f64]) -> Self {
        let shift = |p: &[f64]| p.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<_>>();
        let mut out = self.clone();
        out.halfspaces = self
            .halfspaces
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), h.offset + dot(&h.normal, v)))
            .collect();
        out.vertices = self.vertices.iter().map(|p| shift(p)).collect();
        out.incenter = shift(&self.incenter);
        out.lo = shift(&self.lo);
        out.hi = shift(&self.hi);
        out
    }

    /// True when every vertex satisfies every constraint and every facet is
    /// tight at `n` or more vertices, both at tolerance `eps_geom`.
    pub fn check_consistency(&self) -> bool {
        let eps = self.eps_geom();
        let feasible = self
            .vertices
            .iter()
            .all(|v| self.halfspaces.iter().all(|h| h.slack(v) >= -eps));
        let tight = self.halfspaces.iter().all(|h| {
            self.vertices
                .iter()
                .filter(|v| h.slack(v).abs() <= eps)
                .count()
                >= self.dim
        });
        let unit = self
            .halfspaces
            .iter()
            .all(|h| (norm(&h.normal) - 1.0).abs() <= eps.max(1e-12));
        feasible && tight && unit && self.inradius > eps
    }
}

fn diameter_of(points: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(dist(&points[i], &points[j]));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

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

    fn has_normal(body: &ConvexBody, n: &[f64]) -> bool {
        body.halfspaces().iter().any(|h| dist(&h.normal, n) < 1e-12)
    }

    #[test]
    fn right_triangle_from_vertices() {
        let b = ConvexBody::from_vertices(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(b.halfspaces().len(), 3);
        assert!(has_normal(&b, &[0.0, -1.0]));
        assert!(has_normal(&b, &[-1.0, 0.0]));
        assert!(has_normal(&b, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]));
        assert!((b.volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn square_from_halfspaces() {
        let hs = vec![
            Halfspace::new(vec![1.0, 0.0], 1.0),
            Halfspace::new(vec![-1.0, 0.0], 0.0),
            Halfspace::new(vec![0.0, 1.0], 1.0),
            Halfspace::new(vec![0.0, -1.0], 0.0),
        ];
        let b = ConvexBody::from_halfspaces(2, hs).unwrap();
        assert_eq!(b.vertices().len(), 4);
        assert_eq!(b.facets().len(), 4);
        assert!(b.check_consistency());
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let err = ConvexBody::from_vertices(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]],
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::DegenerateBody(_)));
    }

    #[test]
    fn open_halfspaces_are_unbounded() {
        let hs = vec![
            Halfspace::new(vec![1.0, 0.0], 1.0),
            Halfspace::new(vec![0.0, 1.0], 1.0),
        ];
        assert_eq!(
            ConvexBody::from_halfspaces(2, hs).unwrap_err(),
            GeometryError::Unbounded
        );
        // A strip contains no large balls, so only the bounding LPs notice.
        let hs = vec![
            Halfspace::new(vec![0.0, 1.0], 1.0),
            Halfspace::new(vec![0.0, -1.0], 0.0),
            Halfspace::new(vec![1.0, 0.0], 0.0),
        ];
        assert_eq!(
            ConvexBody::from_halfspaces(2, hs).unwrap_err(),
            GeometryError::Unbounded
        );
    }

    #[test]
    fn dimension_four_is_rejected() {
        let err = ConvexBody::from_vertices(4, vec![vec![0.0; 4]]).unwrap_err();
        assert_eq!(err, GeometryError::DimensionUnsupported { dim: 4 });
    }

    #[test]
    fn support_values() {
        let b = square();
        assert_eq!(b.support_value(&[1.0, 0.0]), 1.0);
        let t = b.translated(&[0.25, -2.0]);
        let d = [0.6, 0.8];
        let expect = b.support_value(&d) + 0.25 * 0.6 - 2.0 * 0.8;
        assert!((t.support_value(&d) - expect).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let b = square();
        assert_eq!(b.distance_to_boundary(&[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(b.distance_to_boundary(&[0.25, 0.5]).unwrap(), 0.25);
        for v in b.vertices() {
            assert!(b.distance_to_boundary(v).unwrap().abs() < 1e-15);
        }
        assert!(matches!(
            b.distance_to_boundary(&[1.5, 0.5]),
            Err(GeometryError::OutsideBody { .. })
        ));
    }

    #[test]
    fn square_erosion() {
        let e = square().erode(0.25).unwrap();
        assert!((e.volume() - 0.25).abs() < 1e-15);
        assert!((e.perimeter() - 2.0).abs() < 1e-15);
        assert!(matches!(
            square().erode(0.5),
            Err(GeometryError::EmptyErosion { .. })
        ));
    }

    #[test]
    fn rectangle_erosion_keeps_facets() {
        let r = ConvexBody::from_vertices(
            2,
            vec![
                vec![0.0, 0.0],
                vec![2.0, 0.0],
                vec![2.0, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap();
        let e = r.erode(0.4).unwrap();
        assert_eq!(e.facets().len(), 4);
        assert!((e.volume() - 1.2 * 0.2).abs() < 1e-14);
        assert!((e.perimeter() - 2.0 * (1.2 + 0.2)).abs() < 1e-14);
        let (lo, hi) = (
            e.vertices().iter().map(|v| v[0]).fold(f64::INFINITY, f64::min),
            e.vertices().iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max),
        );
        assert!((hi - lo - 1.2).abs() < 1e-14);
    }

    #[test]
    fn erosion_drops_vanishing_facets() {
        // A pentagon whose short top-right edge disappears under erosion.
        let b = ConvexBody::from_vertices(
            2,
            vec![
                vec![0.0, 0.0],
                vec![4.0, 0.0],
                vec![4.0, 0.9],
                vec![3.9, 1.0],
                vec![0.0, 1.0],
            ],
        )
        .unwrap();
        assert_eq!(b.facets().len(), 5);
        let e = b.erode(0.3).unwrap();
        assert_eq!(e.facets().len(), 4);
        assert!(e.check_consistency());
    }

    #[test]
    fn cube_from_vertices() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        // Interior and edge-midpoint points must not become vertices.
        pts.push(vec![0.5, 0.5, 0.5]);
        pts.push(vec![0.5, 0.0, 0.0]);
        let b = ConvexBody::from_vertices(3, pts).unwrap();
        assert_eq!(b.vertices().len(), 8);
        assert_eq!(b.facets().len(), 6);
        assert!((b.volume() - 1.0).abs() < 1e-14);
        assert!((b.perimeter() - 6.0).abs() < 1e-14);
        assert!((b.inradius() - 0.5).abs() < 1e-14);
        assert!((b.diameter() - 3f64.sqrt()).abs() < 1e-14);
        assert!(b.check_consistency());
    }

    #[test]
    fn dual_representation_round_trip() {
        let b = ConvexBody::from_vertices(
            3,
            vec![
                vec![0.0, 0.0, 0.0],
                vec![2.0, 0.1, 0.0],
                vec![0.3, 1.5, 0.2],
                vec![0.4, 0.2, 1.1],
                vec![1.2, 1.1, 0.9],
            ],
        )
        .unwrap();
        let again = ConvexBody::from_halfspaces(3, b.halfspaces().to_vec()).unwrap();
        assert_eq!(again.vertices().len(), b.vertices().len());
        for v in b.vertices() {
            assert!(again.vertices().iter().any(|w| dist(v, w) < b.eps_geom()));
        }
        let back = ConvexBody::from_vertices(3, again.vertices().to_vec()).unwrap();
        for h in b.halfspaces() {
            assert!(back.halfspaces().iter().any(|g| {
                dist(&g.normal, &h.normal) < 1e-9 && (g.offset - h.offset).abs() < b.eps_geom()
            }));
        }
    }
}
