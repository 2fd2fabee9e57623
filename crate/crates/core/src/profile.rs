//! Inner-parallel-body profiles and the linear comparison profile.
//!
//! For `t ∈ [0, R]` let `μ(t) = |Ω_t|`, `P(t) = P(Ω_t)` and
//! `L(t) = P(t)^{1/(n−1)}`. The comparison profile `λ(t) = L(0) − a·t` is
//! fixed by `∫_0^R λ^{n−1} = |Ω|`; with `z = 1 − aR/L(0)` this reads
//! `(P·R/n)·(1 + z + … + z^{n−1}) = |Ω|`, an expression without the `a → 0`
//! singularity of the integrated form. The checks below verify, on sampled
//! data, each step of the comparison between `∫ L^{n−1} t²` and
//! `∫ λ^{n−1} t²`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexBody, GeometryError};
use crate::report::Check;

/// Default number of grid intervals.
pub const DEFAULT_GRID: usize = 256;

/// Relative tolerance for checks on exactly computed profile data.
pub const PROFILE_TOL: f64 = 1e-9;

/// Relative bisection tolerance for the slope `a`.
const BISECTION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no sign change of the measure condition: f(0) = {at_zero:e}, f(L/R) = {at_max:e}")]
    NoRoot { at_zero: f64, at_max: f64 },
    #[error("profile has not been fitted")]
    NotFitted,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type Result<T> = std::result::Result<T, ProfileError>;

/// The fitted comparison profile `λ(t) = L(0) − a·t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaFit {
    pub a: f64,
    /// `1 − a·R/L(0)`.
    pub z: f64,
    /// `n|Ω|/(P·R) − 1`.
    pub gamma_tilde: f64,
    /// `z + z² + … + z^{n−1}`, equal to `gamma_tilde` at the root.
    pub gamma_tilde_from_z: f64,
    /// The point where `L − λ` changes sign; `R` when `L ≡ λ`.
    pub t_cross: f64,
    /// Set when `L` and `λ` agree on the whole grid.
    pub equality: bool,
}

/// Sampled profile of a body.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileTable {
    #[serde(skip)]
    body: ConvexBody,
    pub dim: usize,
    pub volume: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub t: Vec<f64>,
    pub mu: Vec<f64>,
    pub per: Vec<f64>,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    pub fit: Option<LambdaFit>,
}

fn root(p: f64, n: usize) -> f64 {
    if n == 2 {
        p
    } else {
        p.max(0.0).powf(1.0 / (n as f64 - 1.0))
    }
}

/// Samples `μ`, `P` and `L` at `t_j = R·sin(πj/(2M))`, `j = 0..=M`, a grid
/// that clusters toward `R` where facets disappear. The last point is moved
/// to `R(1 − 10⁻⁹)`.
pub fn profile_table(body: &ConvexBody, m: usize) -> Result<ProfileTable> {
    if m < 32 {
        return Err(ProfileError::InvalidInput(format!(
            "grid needs at least 32 intervals, got {m}"
        )));
    }
    let r = body.inradius();
    let n = body.dim();
    let mut t: Vec<f64> = (0..=m)
        .map(|j| r * (std::f64::consts::FRAC_PI_2 * j as f64 / m as f64).sin())
        .collect();
    t[0] = 0.0;
    t[m] = r * (1.0 - 1e-9);
    let (mut mu, mut per) = (Vec::with_capacity(m + 1), Vec::with_capacity(m + 1));
    for &tj in &t {
        let (v, p) = if tj == 0.0 {
            (body.volume(), body.perimeter())
        } else {
            body.eroded_measures(tj)
        };
        mu.push(v);
        per.push(p);
    }
    let l = per.iter().map(|&p| root(p, n)).collect();
    Ok(ProfileTable {
        body: body.clone(),
        dim: n,
        volume: body.volume(),
        perimeter: body.perimeter(),
        inradius: r,
        t,
        mu,
        per,
        l,
        fit: None,
    })
}

impl ProfileTable {
    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn l0(&self) -> f64 {
        self.l[0]
    }

    /// `L(t)` at an arbitrary depth.
    pub fn l_at(&self, t: f64) -> f64 {
        root(self.body.eroded_measures(t).1, self.dim)
    }

    /// `λ(t)` under the current fit.
    pub fn lambda_at(&self, t: f64) -> Option<f64> {
        self.fit.map(|f| self.l0() - f.a * t)
    }

    /// CSV with columns `t,mu,per,L,lambda` (`lambda` empty before fitting).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mu,per,L,lambda\n");
        for j in 0..self.t.len() {
            let lam = self
                .lambda_at(self.t[j])
                .map(|v| format!("{v:e}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{}",
                self.t[j], self.mu[j], self.per[j], self.l[j], lam
            );
        }
        out
    }
}

/// `(P·R/n)·Σ_{j<n} z^j − |Ω|` with `z = 1 − aR/L(0)`.
fn measure_defect(table: &ProfileTable, a: f64) -> f64 {
    let z = 1.0 - a * table.inradius / table.l0();
    let sum: f64 = (0..table.dim).map(|j| z.powi(j as i32)).sum();
    table.perimeter * table.inradius / table.dim as f64 * sum - table.volume
}

/// Solves the measure condition for `a` by bisection on `[0, L(0)/R]`, then
/// locates the sign change of `L − λ`.
pub fn fit_lambda(table: &mut ProfileTable) -> Result<LambdaFit> {
    let n = table.dim;
    let (r, l0, vol) = (table.inradius, table.l0(), table.volume);
    let a_max = l0 / r;
    let at_zero = measure_defect(table, 0.0);
    let at_max = measure_defect(table, a_max);
    let slack = BISECTION_TOL * vol;
    if !(at_zero > 0.0) || at_max > slack {
        return Err(ProfileError::NoRoot { at_zero, at_max });
    }
    let a = if at_max >= -slack {
        // Tangential: the root is the endpoint itself.
        a_max
    } else {
        let (mut lo, mut hi) = (0.0, a_max);
        while hi - lo > BISECTION_TOL * a_max {
            let mid = 0.5 * (lo + hi);
            if measure_defect(table, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let z = (1.0 - a * r / l0).max(0.0);
    let gamma_tilde = n as f64 * vol / (table.perimeter * r) - 1.0;
    let gamma_tilde_from_z = (1..n).map(|k| z.powi(k as i32)).sum();

    let tol = PROFILE_TOL * l0;
    let diff: Vec<f64> = table
        .t
        .iter()
        .zip(&table.l)
        .map(|(&t, &l)| l - (l0 - a * t))
        .collect();
    let equality = diff.iter().all(|d| d.abs() <= tol);
    let t_cross = if equality {
        r
    } else {
        match diff.iter().position(|&d| d < -tol) {
            None => r,
            Some(k) => {
                let j = (0..k).rev().find(|&j| diff[j] >= 0.0).unwrap_or(0);
                let d = |t: f64| table.l_at(t) - (l0 - a * t);
                let (mut lo, mut hi) = (table.t[j], table.t[k]);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if d(mid) >= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    };
    let fit = LambdaFit {
        a,
        z,
        gamma_tilde,
        gamma_tilde_from_z,
        t_cross,
        equality,
    };
    table.fit = Some(fit);
    Ok(fit)
}

/// `∫_0^R (L − a t)^{n−1} t² dt` by the triple integration by parts:
///
/// `−R²(L−aR)ⁿ/(an) − 2R(L−aR)^{n+1}/(a²n(n+1))
///  + 2(L^{n+2} − (L−aR)^{n+2})/(a³n(n+1)(n+2))`,
///
/// with the `a = 0` limit `L^{n−1}R³/3`.
pub fn lambda_moment_closed_form(l: f64, a: f64, r: f64, n: usize) -> f64 {
    let nf = n as f64;
    if a == 0.0 {
        return l.powi(n as i32 - 1) * r.powi(3) / 3.0;
    }
    let e = l - a * r;
    -r * r * e.powi(n as i32) / (a * nf)
        - 2.0 * r * e.powi(n as i32 + 1) / (a * a * nf * (nf + 1.0))
        + 2.0 * (l.powi(n as i32 + 2) - e.powi(n as i32 + 2))
            / (a.powi(3) * nf * (nf + 1.0) * (nf + 2.0))
}

/// Size of the terms that cancel in [`lambda_moment_closed_form`].
fn closed_form_scale(l: f64, a: f64, n: usize) -> f64 {
    let nf = n as f64;
    if a == 0.0 {
        0.0
    } else {
        2.0 * l.powi(n as i32 + 2) / (a.powi(3) * nf * (nf + 1.0) * (nf + 2.0))
    }
}

const GAUSS3_X: f64 = 0.774_596_669_241_483_4;
const GAUSS3_W: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

fn gauss3(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * (GAUSS3_W[0] * f(c - h * GAUSS3_X) + GAUSS3_W[1] * f(c) + GAUSS3_W[2] * f(c + h * GAUSS3_X))
}

/// `∫_0^R P(t)·t² dt` (the coarea form of `∫ d²`) by composite 3-point Gauss
/// on the grid intervals, with the Simpson difference as error estimate.
pub fn weighted_perimeter_integral(table: &ProfileTable) -> (f64, f64) {
    let body = &table.body;
    let per = |t: f64| body.eroded_measures(t).1;
    let (mut total, mut err) = (0.0, 0.0);
    let m = table.t.len() - 1;
    for j in 0..m {
        let (a, b) = (table.t[j], table.t[j + 1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let (xl, xr) = (c - h * GAUSS3_X, c + h * GAUSS3_X);
        let (pl, pc, pr) = (per(xl), per(c), per(xr));
        let g = h * (GAUSS3_W[0] * pl * xl * xl + GAUSS3_W[1] * pc * c * c + GAUSS3_W[2] * pr * xr * xr);
        let simpson = (b - a) / 6.0 * (table.per[j] * a * a + 4.0 * pc * c * c + table.per[j + 1] * b * b);
        total += g;
        err += (g - simpson).abs();
    }
    // The last sliver [t_M, R] has P ≈ 0 there; bound it by P(t_M)·R²·width.
    let r = table.inradius;
    let last = table.per[m] * r * r * (r - table.t[m]);
    (total + 0.5 * last, err + last)
}

/// Verification report for one fitted profile, keyed by check id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub fit: LambdaFit,
    pub l_moment: f64,
    pub l_moment_error: f64,
    pub lambda_moment: f64,
    pub checks: BTreeMap<String, Check>,
}

impl ChainReport {
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.values().filter(|c| !c.pass).collect()
    }
}

pub fn verify_profile_chain(table: &ProfileTable) -> Result<ChainReport> {
    let fit = table.fit.ok_or(ProfileError::NotFitted)?;
    let n = table.dim;
    let (r, l0, vol, per0) = (table.inradius, table.l0(), table.volume, table.perimeter);
    let m = table.t.len() - 1;
    let (t, mu, per, l) = (&table.t, &table.mu, &table.per, &table.l);
    let lam = |x: f64| l0 - fit.a * x;
    let mut checks = Vec::new();

    // μ strictly decreasing.
    let worst_step = (0..m).map(|j| mu[j + 1] - mu[j]).fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::lt("mu_decreasing", worst_step, 0.0));

    // μ' = −P by the second-order three-point formula on the nonuniform grid.
    // Tolerance: local variation of the secant slopes of P, which bounds the
    // formula's error both where P is smooth and across kinks of P.
    let slope = |j: usize| (per[j + 1] - per[j]) / (t[j + 1] - t[j]);
    let mut worst_ratio = 0.0f64;
    for j in 1..m {
        let (h1, h2) = (t[j] - t[j - 1], t[j + 1] - t[j]);
        let d = -h2 / (h1 * (h1 + h2)) * mu[j - 1]
            + (h2 - h1) / (h1 * h2) * mu[j]
            + h1 / (h2 * (h1 + h2)) * mu[j + 1];
        let lo = j.saturating_sub(2);
        let hi = (j + 1).min(m - 1);
        let variation = (lo..hi)
            .map(|k| (slope(k + 1) - slope(k)).abs())
            .fold(0.0, f64::max);
        let tol = 2.0 * (h1 + h2) * variation + PROFILE_TOL * per0;
        worst_ratio = worst_ratio.max((d + per[j]).abs() / tol);
    }
    checks.push(Check::le("coarea_derivative", worst_ratio, 1.0, 0.0));

    // L concave: each sample lies above the chord of its neighbours.
    let concavity = (1..m)
        .map(|j| {
            let w = (t[j] - t[j - 1]) / (t[j + 1] - t[j - 1]);
            (1.0 - w) * l[j - 1] + w * l[j + 1] - l[j]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::le("l_concave", concavity, 0.0, PROFILE_TOL * l0));

    // Inclusion bounds μ(t) ≥ (1 − t/R)ⁿ|Ω|, P(t) ≥ (1 − t/R)^{n−1}P(Ω).
    let (mut worst_mu, mut worst_per) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for j in 0..=m {
        let s = 1.0 - t[j] / r;
        worst_mu = worst_mu.max((s.powi(n as i32) * vol - mu[j]) / vol);
        worst_per = worst_per.max((s.powi(n as i32 - 1) * per0 - per[j]) / per0);
    }
    checks.push(Check::le("inclusion_measure", worst_mu, 0.0, PROFILE_TOL));
    checks.push(Check::le("inclusion_perimeter", worst_per, 0.0, PROFILE_TOL));

    // The fitted slope lies in [0, L/R] and matches the measure.
    checks.push(Check::le("slope_range", fit.a * r / l0, 1.0, PROFILE_TOL));
    checks.push(Check::le("slope_nonnegative", -fit.a, 0.0, 0.0));
    let lambda_mass = per0 * r / n as f64 * (0..n).map(|j| fit.z.powi(j as i32)).sum::<f64>();
    checks.push(Check::le(
        "measure_match",
        ((lambda_mass - vol) / vol).abs(),
        0.0,
        1e3 * BISECTION_TOL,
    ));
    checks.push(Check::le(
        "gamma_tilde_identity",
        (fit.gamma_tilde - fit.gamma_tilde_from_z).abs(),
        0.0,
        1e3 * BISECTION_TOL * n as f64,
    ));

    // Endpoint: L(R) ≤ λ(R).
    checks.push(Check::le("endpoint", l[m], lam(t[m]), PROFILE_TOL * l0));

    // Sign pattern of L − λ: nonnegative, then nonpositive.
    let tol = PROFILE_TOL * l0;
    let diff: Vec<f64> = (0..=m).map(|j| l[j] - lam(t[j])).collect();
    let rebound = match diff.iter().position(|&d| d < -tol) {
        None => 0.0,
        Some(k) => diff[k..].iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0),
    };
    checks.push(Check::le("single_crossing", rebound, 0.0, tol));
    let before = (0..=m)
        .filter(|&j| t[j] < fit.t_cross)
        .map(|j| -diff[j])
        .fold(0.0, f64::max);
    let after = (0..=m)
        .filter(|&j| t[j] > fit.t_cross)
        .map(|j| diff[j])
        .fold(0.0, f64::max);
    checks.push(Check::le("crossing_sides", before.max(after), 0.0, tol));

    // ∫ L^{n−1} t² ≤ ∫ λ^{n−1} t².
    let (l_moment, l_moment_error) = weighted_perimeter_integral(table);
    let lambda_pow = |x: f64| lam(x).max(0.0).powi(n as i32 - 1) * x * x;
    // λ^{n−1}t² has degree n + 1 ≤ 5: a single 3-point Gauss rule is exact.
    let lambda_moment = gauss3(lambda_pow, 0.0, r);
    checks.push(Check::le(
        "weighted_comparison",
        l_moment,
        lambda_moment,
        l_moment_error + PROFILE_TOL * lambda_moment,
    ));

    // Triple integration by parts against quadrature.
    let closed = lambda_moment_closed_form(l0, fit.a, r, n);
    let scale = closed_form_scale(l0, fit.a, n);
    checks.push(Check::le(
        "integration_by_parts",
        (closed - lambda_moment).abs(),
        0.0,
        PROFILE_TOL * lambda_moment.abs() + 1e-14 * scale,
    ));

    Ok(ChainReport {
        fit,
        l_moment,
        l_moment_error,
        lambda_moment,
        checks: checks.into_iter().map(|c| (c.name.clone(), c)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(a: f64, b: f64) -> ConvexBody {
        ConvexBody::from_vertices(2, vec![vec![0.0, 0.0], vec![a, 0.0], vec![a, b], vec![0.0, b]])
            .unwrap()
    }

    #[test]
    fn square_profile_is_linear_and_tight() {
        let mut table = profile_table(&rect(1.0, 1.0), 64).unwrap();
        for j in 0..table.t.len() {
            let t = table.t[j];
            assert!((table.mu[j] - (1.0 - 2.0 * t).powi(2)).abs() < 1e-12);
            assert!((table.l[j] - 4.0 * (1.0 - 2.0 * t)).abs() < 1e-12);
        }
        let fit = fit_lambda(&mut table).unwrap();
        assert_eq!(fit.a, 8.0);
        assert_eq!(fit.z, 0.0);
        assert!(fit.equality);
        let rep = verify_profile_chain(&table).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures());
        assert!((rep.l_moment - 1.0 / 24.0).abs() < 1e-12);
        assert!((rep.lambda_moment - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn rectangle_profile_is_linear_too() {
        // Both short sides vanish exactly at t = R, so L stays linear.
        let mut table = profile_table(&rect(2.0, 1.0), 64).unwrap();
        for j in 0..table.t.len() {
            assert!((table.per[j] - (6.0 - 8.0 * table.t[j])).abs() < 1e-12);
        }
        let fit = fit_lambda(&mut table).unwrap();
        assert!(fit.equality);
        // γ̃ = 2·2/(6·0.5) − 1 = 1/3 = z.
        assert!((fit.gamma_tilde - 1.0 / 3.0).abs() < 1e-14);
        assert!((fit.z - 1.0 / 3.0).abs() < 1e-11);
        let rep = verify_profile_chain(&table).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures());
    }

    #[test]
    fn clipped_rectangle_crosses_once() {
        let body = ConvexBody::from_vertices(
            2,
            vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 0.6], vec![1.6, 1.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let mut table = profile_table(&body, 128).unwrap();
        let fit = fit_lambda(&mut table).unwrap();
        assert!(!fit.equality);
        assert!(fit.t_cross > 0.0 && fit.t_cross < table.inradius);
        assert!(fit.z > 0.0 && fit.z < 1.0);
        let rep = verify_profile_chain(&table).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures());
        assert!(rep.l_moment < rep.lambda_moment);
    }

    #[test]
    fn closed_form_moment_matches_quadrature() {
        for (l, a, r, n) in [(4.0, 0.1, 0.5, 2), (3.0, 1.0, 0.7, 3), (2.0, 2.0 / 0.9, 0.9, 3), (1.0, 0.0, 1.0, 4)] {
            let quad = gauss3(|t: f64| (l - a * t).powi(n as i32 - 1) * t * t, 0.0, r);
            let cf = lambda_moment_closed_form(l, a, r, n);
            let tol = 1e-12 * quad + 1e-14 * closed_form_scale(l, a, n);
            assert!((cf - quad).abs() <= tol, "{cf} vs {quad}");
        }
    }

    #[test]
    fn needs_a_fit_and_a_grid() {
        let table = profile_table(&rect(1.0, 1.0), 32).unwrap();
        assert_eq!(verify_profile_chain(&table).unwrap_err(), ProfileError::NotFitted);
        assert!(profile_table(&rect(1.0, 1.0), 8).is_err());
    }

    #[test]
    fn csv_columns() {
        let mut table = profile_table(&rect(1.0, 1.0), 32).unwrap();
        fit_lambda(&mut table).unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("t,mu,per,L,lambda\n"));
        assert_eq!(csv.lines().count(), 34);
    }
}
