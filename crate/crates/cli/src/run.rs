//! Command implementations.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;

use makai_core::families::{make_body, Family, FamilySpec};
use makai_core::fem::{
    ball_torsion, default_node_cap, integrate_d_squared, rectangle_torsion, torsion_ladder,
    torsion_ladder_with, SolverConfig,
};
use makai_core::geometry::io::parse_polytope;
use makai_core::geometry::ConvexBody;
use makai_core::lab::{
    certify_polynomials, evaluate, evaluate_family, sweep, Corpus, InequalityReport,
};
use makai_core::profile::{fit_lambda, profile_table, verify_profile_chain, DEFAULT_GRID};
use makai_core::report::Check;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{parse_n_range, CommandKind, Options, RunConfig};
use crate::error::CliError;

/// A finished run: the report body and whether every check passed.
pub struct Outcome {
    pub body: Value,
    pub csv: Option<String>,
    pub pass: bool,
}

/// Default certificate grid size.
const CERTIFY_GRID: usize = 10_000;

pub fn run(kind: CommandKind, opts: &Options) -> Result<Outcome, CliError> {
    match kind {
        CommandKind::Validate => validate(opts),
        CommandKind::Verify => verify(opts),
        CommandKind::Profile => profile(opts),
        CommandKind::Certify => certify(opts),
        CommandKind::Sweep => run_sweep(opts),
    }
}

pub fn run_config(kind: CommandKind, opts: &Options) -> RunConfig {
    RunConfig {
        command: kind,
        options: opts.clone(),
        node_cap: default_node_cap(),
    }
}

fn solver_config(opts: &Options) -> Result<SolverConfig, CliError> {
    let mesh_h = if opts.mesh_h == "auto" {
        None
    } else {
        let h: f64 = opts
            .mesh_h
            .parse()
            .map_err(|_| CliError::input(format!("--mesh-h must be a length or \"auto\", got {:?}", opts.mesh_h)))?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::input(format!("--mesh-h must be positive, got {h}")));
        }
        Some(h)
    };
    if !(opts.cg_tol > 0.0 && opts.cg_tol <= 1e-4) {
        return Err(CliError::input(format!(
            "--cg-tol must lie in (0, 1e-4], got {}",
            opts.cg_tol
        )));
    }
    Ok(SolverConfig {
        mesh_h,
        refinements: opts.refine,
        cg_tol: opts.cg_tol,
        node_cap: default_node_cap(),
    })
}

/// What a command operates on.
enum Target {
    Body { label: String, body: ConvexBody },
    Spec(FamilySpec),
    Corpus(Corpus),
}

fn single(values: &[f64], flag: &str) -> Result<f64, CliError> {
    match values {
        [v] => Ok(*v),
        _ => Err(CliError::input(format!(
            "{flag} takes a single value here; use sweep for lists"
        ))),
    }
}

fn spec_from_flags(opts: &Options) -> Result<FamilySpec, CliError> {
    let family = opts
        .family
        .ok_or_else(|| CliError::input("either --input or --family is required"))?;
    let dim = opts
        .dim
        .ok_or_else(|| CliError::input("--family needs --dim"))?;
    let mut spec = FamilySpec::new(family, dim);
    if !opts.k.is_empty() && family != Family::Cone {
        return Err(CliError::input("--k applies to the cone family"));
    }
    if !opts.ell.is_empty() && family != Family::Cylinder {
        return Err(CliError::input("--ell applies to the cylinder family"));
    }
    match family {
        Family::Cone => spec = spec.with("k", single(&opts.k, "--k")?),
        Family::Cylinder => spec = spec.with("ell", single(&opts.ell, "--ell")?),
        f if f.is_random() => spec = spec.with_seed(opts.seed),
        _ => {}
    }
    spec.validate()?;
    Ok(spec)
}

fn load_target(opts: &Options) -> Result<Target, CliError> {
    let Some(path) = &opts.input else {
        return Ok(Target::Spec(spec_from_flags(opts)?));
    };
    if opts.family.is_some() {
        return Err(CliError::input("--input and --family are mutually exclusive"));
    }
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{} is not valid JSON: {e}", path.display())))?;
    if value.get("entries").is_some() {
        return Ok(Target::Corpus(Corpus::from_json(&text)?));
    }
    if value.get("family").is_some() {
        let spec: FamilySpec = serde_json::from_value(value)
            .map_err(|e| CliError::input(format!("family spec: {e}")))?;
        spec.validate()?;
        return Ok(Target::Spec(spec));
    }
    let body = parse_polytope(&text)?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into());
    Ok(Target::Body { label, body })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn verify_csv(reports: &[InequalityReport]) -> String {
    let mut out = String::from(
        "body,n,method,T_lower,T_extrapolated,d2,F_lower,F_extrapolated,F_d2,alpha,beta,gamma,deficit_lower,pass\n",
    );
    for r in reports {
        let method = to_value(&r.method);
        let v = &r.values;
        let _ = writeln!(
            out,
            "\"{}\",{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            r.body,
            r.n,
            method.as_str().unwrap_or_default(),
            v.t_lower,
            v.t_extrapolated,
            v.d2,
            v.f_lower,
            v.f_extrapolated,
            v.f_d2,
            r.remainders.alpha,
            r.remainders.beta,
            r.remainders.gamma,
            v.deficit_lower,
            r.all_pass()
        );
    }
    out
}

fn verify(opts: &Options) -> Result<Outcome, CliError> {
    let config = solver_config(opts)?;
    let reports = match load_target(opts)? {
        Target::Body { label, body } => vec![evaluate(&body, &label, &config)?],
        Target::Spec(spec) => vec![evaluate_family(&spec, &config)?],
        Target::Corpus(corpus) => corpus
            .specs()
            .par_iter()
            .map(|spec| evaluate_family(spec, &config))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let pass = reports.iter().all(|r| r.all_pass());
    let csv = verify_csv(&reports);
    let body = if reports.len() == 1 {
        to_value(&reports[0])
    } else {
        let failures: Vec<&str> = reports
            .iter()
            .filter(|r| !r.all_pass())
            .map(|r| r.body.as_str())
            .collect();
        json!({
            "count": reports.len(),
            "failures": failures,
            "bodies": reports,
        })
    };
    Ok(Outcome {
        body,
        csv: Some(csv),
        pass,
    })
}

fn profile_one(body: &ConvexBody, label: &str, m: usize) -> Result<(Value, String, bool), CliError> {
    let mut table = profile_table(body, m)?;
    fit_lambda(&mut table)?;
    let chain = verify_profile_chain(&table)?;
    let pass = chain.all_pass();
    let value = json!({"body": label, "table": table, "chain": chain});
    Ok((value, table.to_csv(), pass))
}

fn profile(opts: &Options) -> Result<Outcome, CliError> {
    let m = opts.grid_m.unwrap_or(DEFAULT_GRID);
    let target = load_target(opts)?;
    let items: Vec<(String, ConvexBody)> = match target {
        Target::Body { label, body } => vec![(label, body)],
        Target::Spec(spec) => vec![(spec.label(), make_body(&spec)?)],
        Target::Corpus(corpus) => corpus
            .specs()
            .iter()
            .map(|s| Ok((s.label(), make_body(s)?)))
            .collect::<Result<Vec<_>, CliError>>()?,
    };
    let results = items
        .par_iter()
        .map(|(label, body)| profile_one(body, label, m))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = results.iter().all(|r| r.2);
    if results.len() == 1 {
        let (value, csv, pass) = results.into_iter().next().expect("one result");
        return Ok(Outcome {
            body: value,
            csv: Some(csv),
            pass,
        });
    }
    let mut csv = String::from("body,");
    csv.push_str(results[0].1.lines().next().unwrap_or_default());
    csv.push('\n');
    for ((label, _), (_, table_csv, _)) in items.iter().zip(&results) {
        for line in table_csv.lines().skip(1) {
            let _ = writeln!(csv, "\"{label}\",{line}");
        }
    }
    let failures: Vec<&str> = items
        .iter()
        .zip(&results)
        .filter(|(_, r)| !r.2)
        .map(|((l, _), _)| l.as_str())
        .collect();
    let bodies: Vec<Value> = results.into_iter().map(|r| r.0).collect();
    Ok(Outcome {
        body: json!({"count": bodies.len(), "failures": failures, "bodies": bodies}),
        csv: Some(csv),
        pass,
    })
}

fn certify(opts: &Options) -> Result<Outcome, CliError> {
    let (lo, hi) = parse_n_range(&opts.n_range).map_err(CliError::input)?;
    let grid = opts.grid_m.unwrap_or(CERTIFY_GRID);
    let certs = (lo..=hi)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| certify_polynomials(n, grid))
        .collect::<Result<Vec<_>, _>>()?;
    let pass = certs.iter().all(|c| c.all_pass());
    let mut csv = String::from("n,check,lhs,rhs,margin,pass\n");
    for c in &certs {
        for ch in &c.checks {
            let _ = writeln!(csv, "{},{},{:e},{:e},{:e},{}", c.n, ch.name, ch.lhs, ch.rhs, ch.margin, ch.pass);
        }
    }
    Ok(Outcome {
        body: json!({ "certificates": certs }),
        csv: Some(csv),
        pass,
    })
}

fn run_sweep(opts: &Options) -> Result<Outcome, CliError> {
    let config = solver_config(opts)?;
    let family = opts
        .family
        .ok_or_else(|| CliError::input("sweep needs --family"))?;
    let dim = opts.dim.ok_or_else(|| CliError::input("sweep needs --dim"))?;
    let (key, values) = match family {
        Family::Cone if opts.ell.is_empty() => ("k", &opts.k),
        Family::Cylinder if opts.k.is_empty() => ("ell", &opts.ell),
        _ => {
            return Err(CliError::input(
                "sweep covers cones (--k list) and cylinders (--ell list)",
            ))
        }
    };
    let base = FamilySpec::new(family, dim);
    let report = sweep(&base, key, values, &config)?;
    Ok(Outcome {
        csv: Some(report.to_csv()),
        pass: report.all_pass(),
        body: to_value(&report),
    })
}

fn validate(opts: &Options) -> Result<Outcome, CliError> {
    let config = solver_config(opts)?;
    let mut checks: Vec<Check> = Vec::new();

    // Ball: u = (1 − |x|²)/(2n) gives T = ω_n/(n(n+2)); F = 3/5 in space.
    let f_ball = ball_torsion(3, 1.0) * (4.0 * PI).powi(2) / (4.0 * PI / 3.0).powi(3);
    checks.push(Check::le("ball_functional", (f_ball - 0.6).abs(), 0.0, 1e-14));

    // Disk: inscribed 64-gon, monotone lower bounds below π/8.
    let disk = make_body(&FamilySpec::regular_polygon(64, 1.0, false))?;
    let ladder = torsion_ladder_with(&disk, 0.2, 2, config.cg_tol, config.node_cap)?;
    let gap = PI / 8.0 - ladder.t_lower;
    checks.push(Check::lt("disk_lower_bound", 0.0, gap));
    checks.push(Check::le("disk_accuracy", gap, 0.02 * PI / 8.0, 0.0));
    checks.push(Check::le(
        "disk_monotone",
        if ladder.monotone { 0.0 } else { 1.0 },
        0.0,
        0.0,
    ));

    // Rectangle 2 × 1 against the series.
    let rect = make_body(&FamilySpec::boxed(&[2.0, 1.0]))?;
    let series = rectangle_torsion(2.0, 1.0)?.value;
    let ladder = torsion_ladder(&rect, 1.0, &config)?;
    checks.push(Check::le(
        "rectangle_series",
        ((ladder.t_extrapolated - series) / series).abs(),
        0.01,
        0.0,
    ));

    // ∫d² over the unit square is 1/24.
    let square = make_body(&FamilySpec::boxed(&[1.0, 1.0]))?;
    let d2 = integrate_d_squared(&square);
    checks.push(Check::le("square_d_squared", (d2.value - 1.0 / 24.0).abs(), 0.0, 1e-12));

    // Tangential bodies: γ = 0 and a flat comparison profile.
    let tangential = [
        FamilySpec::boxed(&[1.0, 1.0]),
        FamilySpec::boxed(&[1.0, 1.0, 1.0]),
        FamilySpec::simplex(2),
        FamilySpec::simplex(3),
        FamilySpec::regular_polygon(6, 1.0, true),
        FamilySpec::tangential_random(2, 8, 1),
        FamilySpec::tangential_random(3, 12, 1),
    ];
    for spec in &tangential {
        let body = make_body(spec)?;
        let s = body.summarize()?;
        checks.push(Check::le(&format!("gamma_zero {}", spec.label()), s.gamma.abs(), 0.0, 1e-10));
        let mut table = profile_table(&body, 64)?;
        let fit = fit_lambda(&mut table)?;
        checks.push(Check::le(&format!("z_zero {}", spec.label()), fit.z, 0.0, 1e-10));
    }

    // Polynomial certificates.
    for n in 2..=10 {
        let cert = certify_polynomials(n, 1000)?;
        let failed = cert.checks.iter().filter(|c| !c.pass).count();
        checks.push(Check::le(&format!("certificate n={n}"), failed as f64, 0.0, 0.0));
    }

    let pass = checks.iter().all(|c| c.pass);
    let mut csv = String::from("check,lhs,rhs,margin,pass\n");
    for c in &checks {
        let _ = writeln!(csv, "\"{}\",{:e},{:e},{:e},{}", c.name, c.lhs, c.rhs, c.margin, c.pass);
    }
    Ok(Outcome {
        body: json!({ "checks": checks }),
        csv: Some(csv),
        pass,
    })
}
