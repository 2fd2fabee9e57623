//! `makai`: command-line front end.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on input
//! errors (with a JSON description on standard error).

mod args;
mod error;
mod run;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Format};
use error::CliError;

fn emit(text: &str, out: Option<&std::path::Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let err = CliError {
                kind: "InvalidArguments".into(),
                message: e.to_string().trim().to_string(),
            };
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    let (kind, opts) = cli.command.split();
    let outcome = match run::run(kind, &opts) {
        Ok(o) => o,
        Err(err) => {
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    let text = match opts.format {
        Format::Json => {
            let report = json!({
                "tool": "makai",
                "version": env!("CARGO_PKG_VERSION"),
                "config": run::run_config(kind, &opts),
                "pass": outcome.pass,
                "report": outcome.body,
            });
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let config = serde_json::to_string(&run::run_config(kind, &opts)).expect("config serializes");
            format!(
                "# makai {} config={}\n{}",
                env!("CARGO_PKG_VERSION"),
                config,
                outcome.csv.unwrap_or_default()
            )
        }
    };
    if let Err(err) = emit(&text, opts.out.as_deref()) {
        eprintln!("{}", err.to_json());
        return ExitCode::from(2);
    }
    if opts.out.is_some() {
        println!("{} {}", if outcome.pass { "PASS" } else { "FAIL" }, kind_name(kind));
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn kind_name(kind: args::CommandKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}
