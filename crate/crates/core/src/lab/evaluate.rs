//! Evaluation of the functional and of every bound in the inequality chain.

use serde::{Deserialize, Serialize};

use super::{LabError, Result};
use crate::families::{
    analytic_geometry, make_body, makai_constant, AnalyticGeometry, Family, FamilySpec,
    POLYA_CONSTANT,
};
use crate::fem::{box_torsion, integrate_d_squared, thin_torsion_estimate, torsion_ladder, SolverConfig, TorsionLadder};
use crate::geometry::ConvexBody;
use crate::report::Check;

/// Relative floor for the strict gap between `T_h` and `∫d²`.
pub const STRICT_GAP: f64 = 1e-6;

/// Largest cone parameter evaluated by finite elements in the plane.
pub const FEM_CONE_MAX_K: f64 = 1e2;

/// `C₁(n) = (n²+3n−4)/(n(n+1)(n+2)(n−1)ⁿ)`.
pub fn c1(n: usize) -> f64 {
    let nf = n as f64;
    (nf * nf + 3.0 * nf - 4.0) / (nf * (nf + 1.0) * (nf + 2.0) * (nf - 1.0).powi(n as i32))
}

/// `C₂(n) = 6n/((n+1)(n+2))`.
pub fn c2(n: usize) -> f64 {
    let nf = n as f64;
    6.0 * nf / ((nf + 1.0) * (nf + 2.0))
}

/// `C₁·γⁿ`, evaluated in log space so that small `γ` at large `n` does not
/// underflow before the multiplication.
pub fn c1_gamma_pow(n: usize, gamma: f64) -> f64 {
    if gamma <= 0.0 {
        0.0
    } else {
        (c1(n).ln() + n as f64 * gamma.ln()).exp()
    }
}

/// How the torsional rigidity was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionMethod {
    /// P1 finite elements; `T_lower` is a certified lower bound.
    Fem,
    /// Convergent series with a certified remainder.
    Series,
    /// First-order thin-domain formula; an estimate, not a bound.
    ThinEstimate,
}

impl TorsionMethod {
    /// Whether `T_lower ≤ T` is guaranteed.
    pub fn certified(self) -> bool {
        !matches!(self, TorsionMethod::ThinEstimate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Values {
    pub volume: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub minwidth: f64,
    pub diameter: f64,
    pub t_lower: f64,
    pub t_extrapolated: f64,
    pub t_error: f64,
    pub d2: f64,
    pub d2_error: f64,
    pub f_lower: f64,
    pub f_extrapolated: f64,
    pub f_error: f64,
    pub f_d2: f64,
    pub f_d2_error: f64,
    pub makai_const: f64,
    pub polya_const: f64,
    pub deficit_lower: f64,
    pub deficit_d2: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remainders {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub body: String,
    pub n: usize,
    pub method: TorsionMethod,
    pub values: Values,
    pub checks: Vec<Check>,
    pub remainders: Remainders,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fem: Option<TorsionLadder>,
}

impl InequalityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// The torsion side of an evaluation.
struct TorsionData {
    method: TorsionMethod,
    lower: f64,
    extrapolated: f64,
    error: f64,
    ladder: Option<TorsionLadder>,
}

struct GeometryData {
    volume: f64,
    perimeter: f64,
    inradius: f64,
    minwidth: f64,
    diameter: f64,
    d2: f64,
    d2_error: f64,
}

impl From<&AnalyticGeometry> for GeometryData {
    fn from(g: &AnalyticGeometry) -> Self {
        Self {
            volume: g.volume,
            perimeter: g.perimeter,
            inradius: g.inradius,
            minwidth: g.minwidth,
            diameter: g.diameter,
            d2: g.d_squared,
            d2_error: 1e-14 * g.d_squared,
        }
    }
}

fn assemble(body: String, n: usize, g: GeometryData, t: TorsionData) -> InequalityReport {
    let nf = n as f64;
    let scale = g.perimeter * g.perimeter / g.volume.powi(3);
    let c = makai_constant(n);
    let q = g.perimeter * g.inradius / g.volume;
    let remainders = Remainders {
        alpha: g.minwidth / g.diameter,
        beta: q - 1.0,
        gamma: nf - q,
    };
    let values = Values {
        volume: g.volume,
        perimeter: g.perimeter,
        inradius: g.inradius,
        minwidth: g.minwidth,
        diameter: g.diameter,
        t_lower: t.lower,
        t_extrapolated: t.extrapolated,
        t_error: t.error,
        d2: g.d2,
        d2_error: g.d2_error,
        f_lower: t.lower * scale,
        f_extrapolated: t.extrapolated * scale,
        f_error: t.error * scale,
        f_d2: g.d2 * scale,
        f_d2_error: g.d2_error * scale,
        makai_const: c,
        polya_const: POLYA_CONSTANT,
        deficit_lower: c - t.lower * scale,
        deficit_d2: c - g.d2 * scale,
        c1: c1(n),
        c2: c2(n),
    };
    let v = &values;
    let (beta, gamma) = (remainders.beta, remainders.gamma);
    let lower_quant = c1_gamma_pow(n, gamma);

    // ∫d²-side checks hold for every path since ∫d² is exact up to quadrature.
    let mut checks = vec![
        Check::le("sandwich_lower", lower_quant, v.deficit_d2, v.f_d2_error),
        Check::le("sandwich_upper", v.deficit_d2, v.c2 * gamma, v.f_d2_error),
    ];
    if t.method.certified() {
        let f_hi = v.f_extrapolated + v.f_error;
        checks.extend([
            Check::le("makai", v.f_lower, c, 0.0),
            Check::le("polya", POLYA_CONSTANT, v.f_extrapolated, v.f_error),
            Check::lt("strict_gap", v.t_lower, (1.0 - STRICT_GAP) * v.d2 - v.d2_error),
            Check::le("ordering", v.f_lower, v.f_d2, v.f_d2_error),
            Check::le("quantitative_makai", lower_quant, v.deficit_lower, 0.0),
            Check::le(
                "beta_bound",
                (v.d2 - v.t_lower) * scale,
                (nf * nf + nf + 1.0) / 3.0 * beta,
                (t.extrapolated + t.error - t.lower) * scale + v.f_d2_error,
            ),
            Check::le(
                "polya_upper",
                f_hi - POLYA_CONSTANT,
                (nf + 1.0) / 3.0 * beta,
                v.f_error,
            ),
            Check::le(
                "polya_lower",
                beta.powi(3) / (8.0 * 81.0 * nf.powi(3)),
                v.f_lower - POLYA_CONSTANT,
                0.0,
            ),
        ]);
    }
    InequalityReport {
        body,
        n,
        method: t.method,
        values,
        checks,
        remainders,
        fem: t.ladder,
    }
}

/// Evaluates a polytope in dimension 2 or 3 with finite elements and the
/// exact `∫d²` decomposition.
pub fn evaluate(body: &ConvexBody, label: &str, config: &SolverConfig) -> Result<InequalityReport> {
    if !(2..=3).contains(&body.dim()) {
        return Err(LabError::InvalidInput(format!(
            "finite elements cover dimensions 2 and 3, got {}",
            body.dim()
        )));
    }
    let summary = body.summarize()?;
    let ladder = torsion_ladder(body, summary.minwidth, config)?;
    let d2 = integrate_d_squared(body);
    let geometry = GeometryData {
        volume: summary.volume,
        perimeter: summary.perimeter,
        inradius: summary.inradius,
        minwidth: summary.minwidth,
        diameter: summary.diameter,
        d2: d2.value,
        d2_error: d2.error,
    };
    let torsion = TorsionData {
        method: TorsionMethod::Fem,
        lower: ladder.t_lower,
        extrapolated: ladder.t_extrapolated,
        error: ladder.t_error,
        ladder: Some(ladder),
    };
    Ok(assemble(label.to_string(), body.dim(), geometry, torsion))
}

/// Picks the evaluation path for a family member:
///
/// * boxes and cylinders in dimension ≤ 3: exact geometry and the box series;
/// * planar cones with `k ≤ 10²` and every other family in dimension ≤ 3:
///   finite elements on the realized polytope;
/// * the remaining cones, cylinders and boxes: closed-form geometry with the
///   first-order thin-domain torsion, which is an estimate and therefore
///   skips every check that needs a bound on `T`.
pub fn evaluate_family(spec: &FamilySpec, config: &SolverConfig) -> Result<InequalityReport> {
    spec.validate()?;
    let label = spec.label();
    let n = spec.dim;
    let series = matches!(spec.family, Family::Box | Family::Cylinder) && n <= 3;
    let thin = match spec.family {
        Family::Cone => n > 2 || spec.params["k"] > FEM_CONE_MAX_K,
        Family::Cylinder | Family::Box => n > 3,
        _ => false,
    };
    if series {
        let g = analytic_geometry(spec)?;
        let edges = box_edges(spec);
        let s = box_torsion(&edges)?;
        let torsion = TorsionData {
            method: TorsionMethod::Series,
            lower: s.value - s.remainder_bound,
            extrapolated: s.value,
            error: s.remainder_bound,
            ladder: None,
        };
        return Ok(assemble(label, n, GeometryData::from(&g), torsion));
    }
    if thin {
        let g = analytic_geometry(spec)?;
        let t = thin_torsion_estimate(spec)?;
        let torsion = TorsionData {
            method: TorsionMethod::ThinEstimate,
            lower: t,
            extrapolated: t,
            error: 0.0,
            ladder: None,
        };
        return Ok(assemble(label, n, GeometryData::from(&g), torsion));
    }
    let body = make_body(spec)?;
    evaluate(&body, &label, config)
}

/// Edges of a box or cylinder member.
fn box_edges(spec: &FamilySpec) -> Vec<f64> {
    match spec.family {
        Family::Cylinder => {
            let mut e = vec![1.0; spec.dim - 1];
            e.push(1.0 / spec.params["ell"]);
            e
        }
        _ => (0..spec.dim)
            .map(|i| spec.params.get(&format!("a{i}")).copied().unwrap_or(1.0))
            .collect(),
    }
}
