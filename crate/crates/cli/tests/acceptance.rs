//! End-to-end acceptance suite: one PASS/FAIL line per criterion.
//!
//! Corpus-wide criteria share a single `verify` run of the `makai` binary
//! over `config/corpus.json`; the remaining criteria call the library or the
//! binary directly.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use makai_core::families::{make_body, makai_constant, FamilySpec};
use makai_core::fem::{
    ball_torsion, default_node_cap, integrate_d_squared, rectangle_torsion, torsion_ladder,
    torsion_ladder_with, SolverConfig,
};
use makai_core::lab::{evaluate_family, TorsionMethod};
use makai_core::profile::{fit_lambda, profile_table};
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/corpus.json")
}

/// Runs the binary, returning its exit code and the JSON written to `--out`.
fn run_json(args: &[&str], dir: &Path, name: &str) -> (i32, Value, Vec<u8>) {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_makai"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("makai runs");
    let bytes = std::fs::read(&out).unwrap_or_default();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status.status.code().unwrap_or(-1), value, bytes)
}

fn checks_of(report: &Value) -> impl Iterator<Item = &Value> {
    report["checks"].as_array().into_iter().flatten()
}

/// Over every corpus body: (bodies where the named check passed, total,
/// smallest margin).
fn corpus_check(bodies: &[Value], name: &str) -> (usize, usize, f64) {
    let mut passed = 0;
    let mut min_margin = f64::INFINITY;
    for b in bodies {
        if let Some(c) = checks_of(b).find(|c| c["name"] == name) {
            if c["pass"] == true {
                passed += 1;
            }
            min_margin = min_margin.min(c["margin"].as_f64().unwrap_or(f64::NEG_INFINITY));
        }
    }
    (passed, bodies.len(), min_margin)
}

fn corpus_summary(bodies: &[Value], names: &[&str]) -> Outcome {
    let mut pass = !bodies.is_empty();
    let mut parts = Vec::new();
    for name in names {
        let (ok, total, margin) = corpus_check(bodies, name);
        pass &= ok == total;
        parts.push(format!("{name} {ok}/{total} (min margin {margin:.3e})"));
    }
    Outcome::new(pass, parts.join(", "))
}

fn disk_oracle() -> Outcome {
    let disk = make_body(&FamilySpec::regular_polygon(256, 1.0, false)).unwrap();
    let ladder = torsion_ladder_with(&disk, 0.16, 3, 1e-10, default_node_cap()).unwrap();
    let exact = ball_torsion(2, 1.0);
    let gap = exact - ladder.t_lower;
    let values: Vec<String> = ladder.levels.iter().map(|l| format!("{:.6}", l.t_h)).collect();
    Outcome::new(
        gap > 0.0 && gap <= 0.005 * exact && ladder.monotone,
        format!(
            "T_h = [{}], π/8 − T_h = {gap:.3e} (limit {:.3e}), h_max {:.4}",
            values.join(", "),
            0.005 * exact,
            ladder.levels.last().unwrap().h_max
        ),
    )
}

fn square_oracle() -> Outcome {
    let square = make_body(&FamilySpec::boxed(&[1.0, 1.0])).unwrap();
    let ladder = torsion_ladder(&square, 1.0, &SolverConfig::default()).unwrap();
    let exact = rectangle_torsion(1.0, 1.0).unwrap().value;
    let rel = (ladder.t_extrapolated - exact).abs() / exact;
    let orders = ladder.convergence_orders(exact);
    let ok_orders = !orders.is_empty() && orders.iter().all(|o| (1.7..=2.3).contains(o));
    Outcome::new(
        rel <= 0.01 && ok_orders,
        format!("Richardson {:.7} vs {exact:.7} (rel {rel:.2e}), slopes {orders:.3?}", ladder.t_extrapolated),
    )
}

fn cone_sharpness(fem_k50: Option<f64>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=5 {
        let r = evaluate_family(&FamilySpec::cone(n, 1e3), &SolverConfig::default()).unwrap();
        let c = makai_constant(n);
        let dev = (r.values.f_extrapolated - c).abs();
        pass &= r.method == TorsionMethod::ThinEstimate && dev <= 0.02 * c;
        parts.push(format!("n={n} |F−c| = {dev:.2e}"));
    }
    let thin = 1.0 / (24.0 * 50f64.powi(3));
    match fem_k50 {
        Some(t) => {
            let rel = (t - thin).abs() / thin;
            pass &= rel <= 0.05;
            parts.push(format!("FEM k=50 T_h/(1/(24k³)) = {:.4}", t / thin));
        }
        None => {
            pass = false;
            parts.push("FEM k=50 value missing".into());
        }
    }
    Outcome::new(pass, parts.join(", "))
}

fn polya_side(bodies: &[Value], dir: &Path) -> Outcome {
    let corpus = corpus_summary(bodies, &["polya"]);
    let (code, json, _) = run_json(
        &["sweep", "--family", "cylinder", "--dim", "3", "--ell", "10,100"],
        dir,
        "cylinder.json",
    );
    let rep = &json["report"];
    let rows = rep["rows"].as_array().cloned().unwrap_or_default();
    let f: Vec<f64> = rows.iter().filter_map(|r| r["f_extrapolated"].as_f64()).collect();
    let g: Vec<f64> = rows.iter().filter_map(|r| r["gamma"].as_f64()).collect();
    let toward = f.len() == 2 && (f[1] - 1.0 / 3.0).abs() < (f[0] - 1.0 / 3.0).abs() && f[1] > 1.0 / 3.0;
    let gamma_up = g.len() == 2 && g[1] > g[0] && (2.0 - g[1]) < 0.05;
    let pass = corpus.pass && code == 0 && rep["f_strictly_decreasing"] == true && toward && gamma_up;
    Outcome::new(
        pass,
        format!("{}; cylinder F {f:.5?}, γ {g:.4?}", corpus.detail),
    )
}

fn certificates(dir: &Path) -> Outcome {
    let (code, json, _) = run_json(&["certify", "--n-range", "2..10", "--grid-m", "10000"], dir, "certify.json");
    let certs = json["report"]["certificates"].as_array().cloned().unwrap_or_default();
    let failures: usize = certs
        .iter()
        .flat_map(|c| c["checks"].as_array().cloned().unwrap_or_default())
        .filter(|c| c["pass"] != true)
        .count();
    Outcome::new(
        code == 0 && certs.len() == 9 && failures == 0,
        format!("{} certificates on 10⁴ points, {failures} failed checks", certs.len()),
    )
}

fn profile_chain(dir: &Path) -> Outcome {
    let corpus = corpus_path();
    let (code, json, _) = run_json(
        &["profile", "--input", corpus.to_str().unwrap()],
        dir,
        "profile.json",
    );
    let rep = &json["report"];
    let count = rep["count"].as_u64().unwrap_or(0);
    let failures = rep["failures"].as_array().map(|f| f.len()).unwrap_or(usize::MAX);
    let mut pass = code == 0 && count == 400 && failures == 0;

    let mut tangential = vec![
        FamilySpec::boxed(&[1.0, 1.0]),
        FamilySpec::boxed(&[1.0, 1.0, 1.0]),
        FamilySpec::simplex(2),
        FamilySpec::simplex(3),
    ];
    tangential.extend((3..=12).map(|m| FamilySpec::regular_polygon(m, 1.0, true)));
    let mut worst: f64 = 0.0;
    for spec in &tangential {
        let body = make_body(spec).unwrap();
        let gamma = body.summarize().unwrap().gamma.abs();
        let mut table = profile_table(&body, 256).unwrap();
        let z = fit_lambda(&mut table).unwrap().z.abs();
        worst = worst.max(gamma).max(z);
    }
    pass &= worst <= 1e-10;
    Outcome::new(
        pass,
        format!(
            "chain on {count} corpus bodies, {failures} failures; {} tangential bodies, max(|z|, |γ|) = {worst:.1e}",
            tangential.len()
        ),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let runs: [&[&str]; 3] = [
        &["verify", "--family", "random_hull", "--dim", "2", "--seed", "17"],
        &["profile", "--family", "tangential_random", "--dim", "3", "--seed", "5", "--format", "csv"],
        &["certify", "--n-range", "2..6", "--grid-m", "2000"],
    ];
    let mut pass = true;
    for (i, args) in runs.iter().enumerate() {
        // Same arguments, including the output path, which is part of the
        // recorded configuration.
        let name = format!("det{i}");
        let (_, _, a) = run_json(args, dir, &name);
        let (_, _, b) = run_json(args, dir, &name);
        pass &= !a.is_empty() && a == b;
    }
    Outcome::new(pass, format!("{} commands run twice, byte-identical: {pass}", runs.len()))
}

/// A fitted slope, or `n/a` where the quantity vanishes along the sweep.
fn slope(v: &Value) -> String {
    v.as_f64().map_or_else(|| "n/a".into(), |s| format!("{s:.3}"))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let dir = dir.path();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, title: &'static str, outcome: Outcome| {
        println!(
            "{} {id:>2} {title}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
        results.push((id, title, outcome));
    };

    report(1, "disk torsion oracle", disk_oracle());
    report(2, "square torsion oracle", square_oracle());

    let corpus = corpus_path();
    let (code, json, _) = run_json(&["verify", "--input", corpus.to_str().unwrap()], dir, "corpus.json");
    let bodies = json["report"]["bodies"].as_array().cloned().unwrap_or_default();
    if code != 0 || bodies.len() != 400 {
        println!("corpus verify: exit {code}, {} bodies", bodies.len());
    }

    report(3, "upper bound on the corpus", corpus_summary(&bodies, &["makai"]));

    let square = make_body(&FamilySpec::boxed(&[1.0, 1.0])).unwrap();
    let d2 = integrate_d_squared(&square).value;
    let mut gap = corpus_summary(&bodies, &["strict_gap"]);
    gap.pass &= (d2 - 1.0 / 24.0).abs() <= 1e-8;
    gap.detail.push_str(&format!("; square ∫d² − 1/24 = {:.1e}", d2 - 1.0 / 24.0));
    report(4, "strict gap to ∫d²", gap);

    // The planar cone sweep feeds both the sharpness cross-check and the
    // maximizing-sequence signature.
    let (sweep_code, cone, _) = run_json(
        &["sweep", "--family", "cone", "--dim", "2", "--k", "2,5,10,20,50"],
        dir,
        "cone.json",
    );
    let cone = &cone["report"];
    let fem_k50 = cone["reports"]
        .as_array()
        .and_then(|r| r.last())
        .filter(|r| r["method"] == "fem")
        .and_then(|r| r["values"]["t_lower"].as_f64());
    report(5, "cone sharpness", cone_sharpness(fem_k50));

    report(6, "lower bound side", polya_side(&bodies, dir));
    report(
        7,
        "quantitative bound and sandwich",
        corpus_summary(&bodies, &["quantitative_makai", "sandwich_lower", "sandwich_upper"]),
    );
    report(8, "beta bound", corpus_summary(&bodies, &["beta_bound"]));
    report(9, "polynomial certificates", certificates(dir));
    report(10, "profile chain", profile_chain(dir));

    let rows = cone["rows"].as_array().cloned().unwrap_or_default();
    let alpha: Vec<f64> = rows.iter().filter_map(|r| r["alpha"].as_f64()).collect();
    let deficit: Vec<String> = rows
        .iter()
        .filter_map(|r| r["deficit"].as_f64())
        .map(|d| format!("{d:.3e}"))
        .collect();
    let slopes = &cone["slopes"];
    report(
        11,
        "maximizing sequence signature",
        Outcome::new(
            sweep_code == 0
                && rows.len() == 5
                && cone["alpha_strictly_decreasing"] == true
                && cone["deficit_strictly_decreasing"] == true,
            format!(
                "α {alpha:.4?}, deficit [{}]; log-log slopes α {}, deficit {}, β {}, γ {}",
                deficit.join(", "),
                slope(&slopes["alpha"]),
                slope(&slopes["deficit"]),
                slope(&slopes["beta"]),
                slope(&slopes["gamma"]),
            ),
        ),
    );
    report(12, "determinism", determinism(dir));

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
