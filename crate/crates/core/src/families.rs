//! Parametric shape families: flattening cones, thinning cylinders, boxes,
//! corner simplices, regular polygons and two random generators, together
//! with closed-form geometry valid in any dimension.
//!
//! A [`FamilySpec`] serializes as
//!
//! ```json
//! {"family": "cone", "dim": 2, "params": {"k": 10}, "seed": 0}
//! ```
//!
//! Recognized parameters (all optional unless noted):
//!
//! | family              | parameters                                           |
//! |---------------------|------------------------------------------------------|
//! | `cone`              | `k` (flattening, required), `m` (base facets, n = 3) |
//! | `cylinder`          | `ell` (height is `1/ell`, required)                  |
//! | `box`               | `a0`, `a1`, … edge lengths (default 1)               |
//! | `simplex`           | none                                                 |
//! | `regular_polygon`   | `m`, `radius`, `circumscribed` (0 or 1, default 1)   |
//! | `tangential_random` | `count` (number of facet normals)                    |
//! | `random_hull`       | `count` (number of sampled points)                   |

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::linalg::factorial;
use crate::geometry::{ConvexBody, GeometryError, Halfspace, Provenance};

/// Facet count of the polygonal cone base in three dimensions.
pub const DEFAULT_CONE_BASE_FACETS: usize = 64;

/// Attempts before a random generator gives up on drawing a valid body.
const MAX_DRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("invalid family parameters: {0}")]
    InvalidSpec(String),
    #[error("no closed form for family {0}")]
    NoClosedForm(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, FamilyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cone,
    Cylinder,
    Box,
    Simplex,
    RegularPolygon,
    TangentialRandom,
    RandomHull,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cone => "cone",
            Family::Cylinder => "cylinder",
            Family::Box => "box",
            Family::Simplex => "simplex",
            Family::RegularPolygon => "regular_polygon",
            Family::TangentialRandom => "tangential_random",
            Family::RandomHull => "random_hull",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, Family::TangentialRandom | Family::RandomHull)
    }
}

impl std::str::FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| FamilyError::InvalidSpec(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub family: Family,
    pub dim: usize,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(family: Family, dim: usize) -> Self {
        Self {
            family,
            dim,
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn cone(dim: usize, k: f64) -> Self {
        Self::new(Family::Cone, dim).with("k", k)
    }

    pub fn cylinder(dim: usize, ell: f64) -> Self {
        Self::new(Family::Cylinder, dim).with("ell", ell)
    }

    pub fn boxed(edges: &[f64]) -> Self {
        edges
            .iter()
            .enumerate()
            .fold(Self::new(Family::Box, edges.len()), |s, (i, &a)| {
                s.with(&format!("a{i}"), a)
            })
    }

    pub fn simplex(dim: usize) -> Self {
        Self::new(Family::Simplex, dim)
    }

    pub fn regular_polygon(m: usize, radius: f64, circumscribed: bool) -> Self {
        Self::new(Family::RegularPolygon, 2)
            .with("m", m as f64)
            .with("radius", radius)
            .with("circumscribed", if circumscribed { 1.0 } else { 0.0 })
    }

    pub fn tangential_random(dim: usize, count: usize, seed: u64) -> Self {
        Self::new(Family::TangentialRandom, dim)
            .with("count", count as f64)
            .with_seed(seed)
    }

    pub fn random_hull(dim: usize, count: usize, seed: u64) -> Self {
        Self::new(Family::RandomHull, dim)
            .with("count", count as f64)
            .with_seed(seed)
    }

    /// Short human-readable identifier, e.g. `cone(n=2,k=10)`.
    pub fn label(&self) -> String {
        let mut parts = vec![format!("n={}", self.dim)];
        parts.extend(self.params.iter().map(|(k, v)| format!("{k}={v}")));
        if self.family.is_random() {
            parts.push(format!("seed={}", self.seed));
        }
        format!("{}({})", self.family.name(), parts.join(","))
    }

    fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    fn required(&self, key: &str) -> Result<f64> {
        let v = self.param(key).ok_or_else(|| {
            FamilyError::InvalidSpec(format!("{} needs parameter {key:?}", self.family.name()))
        })?;
        positive(key, v)
    }

    fn optional(&self, key: &str, default: f64) -> Result<f64> {
        positive(key, self.param(key).unwrap_or(default))
    }

    fn count(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v = self.param(key).unwrap_or(default as f64);
        if v.fract() != 0.0 || v < min as f64 || v > 1e6 {
            return Err(FamilyError::InvalidSpec(format!(
                "{key} must be an integer ≥ {min}, got {v}"
            )));
        }
        Ok(v as usize)
    }

    fn edges(&self) -> Result<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.optional(&format!("a{i}"), 1.0))
            .collect()
    }

    /// Checks dimension and parameter ranges without building anything.
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(FamilyError::InvalidSpec(format!(
                "dimension must be at least 2, got {}",
                self.dim
            )));
        }
        match self.family {
            Family::Cone => {
                self.required("k")?;
                self.count("m", DEFAULT_CONE_BASE_FACETS, 3)?;
            }
            Family::Cylinder => {
                self.required("ell")?;
            }
            Family::Box => {
                self.edges()?;
            }
            Family::Simplex => {}
            Family::RegularPolygon => {
                if self.dim != 2 {
                    return Err(FamilyError::InvalidSpec(
                        "regular polygons live in dimension 2".into(),
                    ));
                }
                self.count("m", 6, 3)?;
                self.optional("radius", 1.0)?;
                let c = self.param("circumscribed").unwrap_or(1.0);
                if c != 0.0 && c != 1.0 {
                    return Err(FamilyError::InvalidSpec(
                        "circumscribed must be 0 or 1".into(),
                    ));
                }
            }
            Family::TangentialRandom | Family::RandomHull => {
                self.count("count", 2 * self.dim + 4, self.dim + 1)?;
            }
        }
        Ok(())
    }

    fn provenance(&self) -> Provenance {
        let mut params = self.params.clone();
        if self.family.is_random() {
            params.insert("seed".into(), self.seed as f64);
        }
        params.insert("dim".into(), self.dim as f64);
        Provenance::Family {
            name: self.family.name().to_string(),
            params,
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(FamilyError::InvalidSpec(format!(
            "{key} must be positive and finite, got {v}"
        )))
    }
}

/// Volume `ω_k` of the unit ball in `R^k`, by `ω_k = ω_{k−2}·2π/k`.
pub fn unit_ball_volume(k: usize) -> f64 {
    let (mut even, mut odd) = (1.0, 2.0);
    let mut j = 0;
    while j + 2 <= k {
        j += 2;
        even *= 2.0 * PI / j as f64;
        odd *= 2.0 * PI / (j + 1) as f64;
    }
    if k % 2 == 0 {
        even
    } else {
        odd
    }
}

/// The sharp upper constant `2n²/((n+1)(n+2))`.
pub fn makai_constant(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * n / ((n + 1.0) * (n + 2.0))
}

/// The lower constant `1/3`.
pub const POLYA_CONSTANT: f64 = 1.0 / 3.0;

/// Builds the polytopal realization of `spec` (dimensions 2 and 3).
pub fn make_body(spec: &FamilySpec) -> Result<ConvexBody> {
    spec.validate()?;
    let n = spec.dim;
    if n > 3 {
        return Err(GeometryError::DimensionUnsupported { dim: n }.into());
    }
    let body = match spec.family {
        Family::Cone => {
            let h = 1.0 / spec.required("k")?;
            let mut pts = if n == 2 {
                vec![vec![-1.0, 0.0], vec![1.0, 0.0]]
            } else {
                let m = spec.count("m", DEFAULT_CONE_BASE_FACETS, 3)?;
                (0..m)
                    .map(|j| {
                        let th = 2.0 * PI * j as f64 / m as f64;
                        vec![th.cos(), th.sin(), 0.0]
                    })
                    .collect()
            };
            let mut apex = vec![0.0; n];
            apex[n - 1] = h;
            pts.push(apex);
            ConvexBody::from_vertices(n, pts)?
        }
        Family::Cylinder => {
            let half = 0.5 / spec.required("ell")?;
            let mut lo = vec![0.0; n];
            let mut hi = vec![1.0; n];
            lo[n - 1] = -half;
            hi[n - 1] = half;
            axis_box(&lo, &hi)?
        }
        Family::Box => {
            let hi = spec.edges()?;
            axis_box(&vec![0.0; n], &hi)?
        }
        Family::Simplex => {
            let mut pts = vec![vec![0.0; n]];
            for i in 0..n {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                pts.push(e);
            }
            ConvexBody::from_vertices(n, pts)?
        }
        Family::RegularPolygon => {
            let m = spec.count("m", 6, 3)?;
            let rho = spec.optional("radius", 1.0)?;
            let circumscribed = spec.param("circumscribed").unwrap_or(1.0) == 1.0;
            let pts = (0..m)
                .map(|j| {
                    if circumscribed {
                        // Facet normals at angles 2πj/m, apothem ρ.
                        let th = (2 * j + 1) as f64 * PI / m as f64;
                        let r = rho / (PI / m as f64).cos();
                        vec![r * th.cos(), r * th.sin()]
                    } else {
                        let th = 2.0 * PI * j as f64 / m as f64;
                        vec![rho * th.cos(), rho * th.sin()]
                    }
                })
                .collect();
            ConvexBody::from_vertices(2, pts)?
        }
        Family::TangentialRandom => tangential_random(spec)?,
        Family::RandomHull => random_hull(spec)?,
    };
    Ok(body.with_provenance(spec.provenance()))
}

fn axis_box(lo: &[f64], hi: &[f64]) -> Result<ConvexBody> {
    let n = lo.len();
    let mut hs = Vec::with_capacity(2 * n);
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        hs.push(Halfspace::new(e.clone(), hi[k]));
        e[k] = -1.0;
        hs.push(Halfspace::new(e, -lo[k]));
    }
    Ok(ConvexBody::from_halfspaces(n, hs)?)
}

fn gaussian_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-3 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Intersection of halfspaces tangent to the unit ball with random normals;
/// redrawn from the same stream until the intersection is bounded.
fn tangential_random(spec: &FamilySpec) -> Result<ConvexBody> {
    let n = spec.dim;
    let count = spec.count("count", 2 * n + 4, n + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_DRAWS {
        let hs = (0..count)
            .map(|_| Halfspace::new(gaussian_unit(&mut rng, n), 1.0))
            .collect();
        match ConvexBody::from_halfspaces(n, hs) {
            Ok(body) => return Ok(body),
            Err(GeometryError::Unbounded) | Err(GeometryError::DegenerateBody(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(FamilyError::InvalidSpec(format!(
        "no bounded body after {MAX_DRAWS} draws"
    )))
}

/// Convex hull of points uniform in `[−1, 1]^n`.
fn random_hull(spec: &FamilySpec) -> Result<ConvexBody> {
    let n = spec.dim;
    let count = spec.count("count", 2 * n + 4, n + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..MAX_DRAWS {
        let pts = (0..count)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        match ConvexBody::from_vertices(n, pts) {
            Ok(body) => return Ok(body),
            Err(GeometryError::DegenerateBody(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(FamilyError::InvalidSpec(format!(
        "no full-dimensional hull after {MAX_DRAWS} draws"
    )))
}

/// Closed-form functionals of a family member, in any dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticGeometry {
    pub volume: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub minwidth: f64,
    pub diameter: f64,
    /// `∫_Ω d(x, ∂Ω)² dx` in closed form.
    pub d_squared: f64,
    /// Leading coefficient `c` in `T ~ c·ε³` along the thin limit, where `ε`
    /// is `1/k` for cones and `1/ell` for cylinders.
    pub torsion_limit_coeff: Option<f64>,
    /// Whether each of volume, perimeter, inradius, minwidth, diameter is
    /// exact (as opposed to a bound or approximation).
    pub exact: ExactFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactFlags {
    pub volume: bool,
    pub perimeter: bool,
    pub inradius: bool,
    pub minwidth: bool,
    pub diameter: bool,
}

impl ExactFlags {
    const ALL: Self = Self {
        volume: true,
        perimeter: true,
        inradius: true,
        minwidth: true,
        diameter: true,
    };
}

impl AnalyticGeometry {
    pub fn beta(&self) -> f64 {
        self.perimeter * self.inradius / self.volume - 1.0
    }

    pub fn gamma(&self, n: usize) -> f64 {
        n as f64 - self.perimeter * self.inradius / self.volume
    }

    pub fn alpha(&self) -> f64 {
        self.minwidth / self.diameter
    }
}

/// `∫_Ω d² = 2R³P/(n(n+1)(n+2))` for tangential bodies, whose inner parallel
/// sets have perimeter `P(1 − t/R)^{n−1}`.
pub fn tangential_d_squared(n: usize, inradius: f64, perimeter: f64) -> f64 {
    let n = n as f64;
    2.0 * inradius.powi(3) * perimeter / (n * (n + 1.0) * (n + 2.0))
}

/// `∫_Ω d²` for the box with the given edges, by the coarea formula with the
/// polynomial perimeter profile `P(t) = 2 Σ_i Π_{j≠i} (a_j − 2t)`.
pub fn box_d_squared(edges: &[f64]) -> f64 {
    let r = 0.5 * edges.iter().copied().fold(f64::INFINITY, f64::min);
    let per = |t: f64| -> f64 {
        (0..edges.len())
            .map(|i| {
                2.0 * edges
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &a)| a - 2.0 * t)
                    .product::<f64>()
            })
            .sum()
    };
    // The integrand has degree n + 1, within reach of the 8-point rule.
    assert!(edges.len() <= 14, "box dimension too large for exact quadrature");
    gauss_legendre_8(|t| per(t) * t * t, 0.0, r)
}

/// 8-point Gauss–Legendre quadrature on `[a, b]`, exact through degree 15.
pub(crate) fn gauss_legendre_8(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    X.iter()
        .zip(W)
        .map(|(&x, w)| w * (f(c - h * x) + f(c + h * x)))
        .sum::<f64>()
        * h
}

/// Closed-form geometry for the deterministic families.
///
/// The cone is the cone of revolution over the unit (n−1)-ball with height
/// `1/k` (for n = 2 this is exactly the realized triangle); the cylinder is
/// the unit cube base `[0,1]^{n−1}` times an interval of length `1/ell`.
pub fn analytic_geometry(spec: &FamilySpec) -> Result<AnalyticGeometry> {
    spec.validate()?;
    let n = spec.dim;
    let nf = n as f64;
    match spec.family {
        Family::Cone => {
            let k = spec.required("k")?;
            let h = 1.0 / k;
            let s = (1.0 + h * h).sqrt();
            let w = unit_ball_volume(n - 1);
            let perimeter = w * (1.0 + s);
            let inradius = h / (1.0 + s);
            Ok(AnalyticGeometry {
                volume: w * h / nf,
                perimeter,
                inradius,
                minwidth: h.min(2.0 * h / s),
                diameter: s.max(2.0),
                d_squared: tangential_d_squared(n, inradius, perimeter),
                torsion_limit_coeff: Some(w / (2.0 * nf * (nf + 1.0) * (nf + 2.0))),
                exact: ExactFlags::ALL,
            })
        }
        Family::Cylinder => {
            let ell = spec.required("ell")?;
            let mut edges = vec![1.0; n];
            edges[n - 1] = 1.0 / ell;
            let mut g = box_geometry(&edges);
            g.torsion_limit_coeff = Some(1.0 / 12.0);
            Ok(g)
        }
        Family::Box => Ok(box_geometry(&spec.edges()?)),
        Family::Simplex => {
            let facet = 1.0 / factorial(n - 1);
            let perimeter = facet * (nf + nf.sqrt());
            let inradius = 1.0 / (nf + nf.sqrt());
            Ok(AnalyticGeometry {
                volume: 1.0 / factorial(n),
                perimeter,
                inradius,
                // Width along (1,…,1)/√n; the minimum for n ≤ 3.
                minwidth: 1.0 / nf.sqrt(),
                diameter: 2f64.sqrt(),
                d_squared: tangential_d_squared(n, inradius, perimeter),
                torsion_limit_coeff: None,
                exact: ExactFlags {
                    minwidth: n <= 3,
                    ..ExactFlags::ALL
                },
            })
        }
        Family::RegularPolygon => {
            let m = spec.count("m", 6, 3)?;
            let rho = spec.optional("radius", 1.0)?;
            let circumscribed = spec.param("circumscribed").unwrap_or(1.0) == 1.0;
            let t = PI / m as f64;
            let (apothem, circumradius) = if circumscribed {
                (rho, rho / t.cos())
            } else {
                (rho * t.cos(), rho)
            };
            let mf = m as f64;
            let volume = mf * apothem * apothem * t.tan();
            let perimeter = 2.0 * mf * apothem * t.tan();
            let (minwidth, diameter) = if m % 2 == 0 {
                (2.0 * apothem, 2.0 * circumradius)
            } else {
                (apothem + circumradius, 2.0 * circumradius * (0.5 * t).cos())
            };
            Ok(AnalyticGeometry {
                volume,
                perimeter,
                inradius: apothem,
                minwidth,
                diameter,
                d_squared: tangential_d_squared(2, apothem, perimeter),
                torsion_limit_coeff: None,
                exact: ExactFlags::ALL,
            })
        }
        Family::TangentialRandom | Family::RandomHull => {
            Err(FamilyError::NoClosedForm(spec.family.name().into()))
        }
    }
}

fn box_geometry(edges: &[f64]) -> AnalyticGeometry {
    let volume: f64 = edges.iter().product();
    let perimeter: f64 = edges.iter().map(|a| 2.0 * volume / a).sum();
    let min = edges.iter().copied().fold(f64::INFINITY, f64::min);
    AnalyticGeometry {
        volume,
        perimeter,
        inradius: 0.5 * min,
        minwidth: min,
        diameter: edges.iter().map(|a| a * a).sum::<f64>().sqrt(),
        d_squared: box_d_squared(edges),
        torsion_limit_coeff: None,
        exact: ExactFlags::ALL,
    }
}
