//! Family sweeps: the functional and the remainders along a parameter.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::evaluate::{c1_gamma_pow, evaluate_family, InequalityReport, TorsionMethod};
use super::{LabError, Result};
use crate::families::FamilySpec;
use crate::fem::SolverConfig;

/// One parameter value of a sweep. The deficit uses the extrapolated
/// functional, the best available estimate of `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub method: TorsionMethod,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub f_lower: f64,
    pub f_extrapolated: f64,
    pub f_d2: f64,
    pub deficit: f64,
    pub beta_over_alpha: f64,
    /// `deficit/γⁿ`; absent when `γ` vanishes.
    pub deficit_over_gamma_pow: Option<f64>,
    pub checks_pass: bool,
}

/// Least-squares slopes of `log y` against `log(1/param)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSlopes {
    pub alpha: Option<f64>,
    pub deficit: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: FamilySpec,
    pub key: String,
    pub rows: Vec<SweepRow>,
    pub slopes: SweepSlopes,
    pub alpha_strictly_decreasing: bool,
    pub deficit_strictly_decreasing: bool,
    pub f_strictly_increasing: bool,
    pub f_strictly_decreasing: bool,
    pub reports: Vec<InequalityReport>,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.all_pass())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "{},method,alpha,beta,gamma,F_lower,F_extrapolated,F_d2,deficit,beta_over_alpha,deficit_over_gamma_pow,checks_pass\n",
            self.key
        );
        for r in &self.rows {
            let ratio = r
                .deficit_over_gamma_pow
                .map(|v| format!("{v:e}"))
                .unwrap_or_default();
            let method = serde_json::to_value(r.method).expect("enum serializes");
            let _ = writeln!(
                out,
                "{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
                r.param,
                method.as_str().unwrap_or_default(),
                r.alpha,
                r.beta,
                r.gamma,
                r.f_lower,
                r.f_extrapolated,
                r.f_d2,
                r.deficit,
                r.beta_over_alpha,
                ratio,
                r.checks_pass
            );
        }
        out
    }
}

/// Slope of the least-squares line through `(ln x, ln y)` over positive pairs.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(sx, sy), (a, b)| (sx + a, sy + b));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(a, _)| (a - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn strictly(values: &[f64], decreasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] })
}

/// Evaluates `base` with `key` set to each value in turn. The values must
/// be strictly monotone.
pub fn sweep(base: &FamilySpec, key: &str, values: &[f64], config: &SolverConfig) -> Result<SweepReport> {
    if values.is_empty() || !(strictly(values, false) || strictly(values, true)) {
        return Err(LabError::InvalidInput(format!(
            "sweep values for {key} must be nonempty and strictly monotone, got {values:?}"
        )));
    }
    let mut reports = Vec::with_capacity(values.len());
    for &v in values {
        let spec = base.clone().with(key, v);
        reports.push(evaluate_family(&spec, config)?);
    }
    let rows: Vec<SweepRow> = values
        .iter()
        .zip(&reports)
        .map(|(&param, r)| {
            let rem = r.remainders;
            let deficit = r.values.makai_const - r.values.f_extrapolated;
            let gp = c1_gamma_pow(r.n, rem.gamma) / r.values.c1;
            SweepRow {
                param,
                method: r.method,
                alpha: rem.alpha,
                beta: rem.beta,
                gamma: rem.gamma,
                f_lower: r.values.f_lower,
                f_extrapolated: r.values.f_extrapolated,
                f_d2: r.values.f_d2,
                deficit,
                beta_over_alpha: rem.beta / rem.alpha,
                deficit_over_gamma_pow: (gp > 0.0).then(|| deficit / gp),
                checks_pass: r.all_pass(),
            }
        })
        .collect();
    let inv: Vec<f64> = values.iter().map(|v| 1.0 / v).collect();
    let col = |f: fn(&SweepRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let slopes = SweepSlopes {
        alpha: log_log_slope(&inv, &col(|r| r.alpha)),
        deficit: log_log_slope(&inv, &col(|r| r.deficit)),
        beta: log_log_slope(&inv, &col(|r| r.beta)),
        gamma: log_log_slope(&inv, &col(|r| r.gamma)),
    };
    let f = col(|r| r.f_extrapolated);
    Ok(SweepReport {
        family: base.clone(),
        key: key.to_string(),
        alpha_strictly_decreasing: strictly(&col(|r| r.alpha), true),
        deficit_strictly_decreasing: strictly(&col(|r| r.deficit), true),
        f_strictly_increasing: strictly(&f, false),
        f_strictly_decreasing: strictly(&f, true),
        rows,
        slopes,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Family;

    #[test]
    fn slope_of_a_power_law() {
        let x = [1.0, 0.1, 0.01];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((log_log_slope(&x, &y).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(log_log_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn rejects_unordered_parameters() {
        let base = FamilySpec::new(Family::Cylinder, 3);
        assert!(sweep(&base, "ell", &[10.0, 2.0, 5.0], &SolverConfig::default()).is_err());
        assert!(sweep(&base, "ell", &[], &SolverConfig::default()).is_err());
    }

    #[test]
    fn flattening_cylinders_head_to_the_lower_constant() {
        let base = FamilySpec::new(Family::Cylinder, 3);
        let rep = sweep(&base, "ell", &[10.0, 100.0], &SolverConfig::default()).unwrap();
        assert!(rep.f_strictly_decreasing);
        assert!(rep.rows[1].gamma > rep.rows[0].gamma);
        assert!(rep.rows[1].gamma > 1.9);
        assert!(rep.all_pass());
        assert_eq!(rep.to_csv().lines().count(), 3);
    }
}
