//! Command-line arguments and the run configuration embedded in reports.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use makai_core::families::Family;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "makai",
    version,
    about = "Torsional rigidity, the Makai functional and its sharp bounds on convex polytopes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Validate,
    Verify,
    Profile,
    Certify,
    Sweep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the analytic-oracle suite.
    Validate(Options),
    /// Evaluate every bound for one body, a family member or a corpus.
    Verify(Options),
    /// Inner-parallel-body profile and the comparison-profile checks.
    Profile(Options),
    /// Exact polynomial certificates over a range of dimensions.
    Certify(Options),
    /// Evaluate a family along a list of `--k` or `--ell` values.
    Sweep(Options),
}

impl Command {
    pub fn split(self) -> (CommandKind, Options) {
        match self {
            Command::Validate(o) => (CommandKind::Validate, o),
            Command::Verify(o) => (CommandKind::Verify, o),
            Command::Profile(o) => (CommandKind::Profile, o),
            Command::Certify(o) => (CommandKind::Certify, o),
            Command::Sweep(o) => (CommandKind::Sweep, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: makai_core::families::FamilyError| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// Family name: cone, cylinder, box, simplex, regular_polygon,
    /// tangential_random or random_hull.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Ambient dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Cone flatness parameters (height 1/k), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<f64>,
    /// Cylinder flatness parameters (height 1/ell), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<f64>,
    /// Polytope, family-spec or corpus JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Initial mesh size, or "auto".
    #[arg(long, default_value = "auto")]
    pub mesh_h: String,
    /// Uniform refinements after the initial mesh.
    #[arg(long)]
    pub refine: Option<usize>,
    /// Relative residual tolerance of conjugate gradients.
    #[arg(long, default_value_t = 1e-10)]
    pub cg_tol: f64,
    /// Profile grid intervals (profile) or certificate grid size (certify).
    #[arg(long)]
    pub grid_m: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for the random families.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Inclusive dimension range for certify, e.g. 2..10.
    #[arg(long, default_value = "2..10")]
    pub n_range: String,
}

/// Everything that determines a report, serialized into it.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(flatten)]
    pub options: Options,
    pub node_cap: usize,
}

/// Parses `a..b` or `a..=b` (both inclusive) or a single value.
pub fn parse_n_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("invalid --n-range {s:?}; expected e.g. 2..10");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_n_range("2..6"), Ok((2, 6)));
        assert_eq!(parse_n_range("2..=6"), Ok((2, 6)));
        assert_eq!(parse_n_range("4"), Ok((4, 4)));
        assert!(parse_n_range("6..2").is_err());
        assert!(parse_n_range("a..b").is_err());
    }
}
