//! Command-line front end: parse manifests, run their tasks, or run the
//! built-in acceptance suite.  Exit codes: 0 all tasks pass, 1 a check failed,
//! 2 input error.

use clap::{Parser, Subcommand, ValueEnum};
use gerbelab::cli::{emit_report, parse_manifest, run_with, Format, Report, RunOptions, Status, TaskReport};
use gerbelab::suite;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gerbelab", version, about = "Local gerbes, multisymplectic observables, and loop-space holonomy")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a manifest without running its tasks
    Check { manifest: PathBuf },
    /// Run the tasks of a manifest and print a report
    Run {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Include per-task wall-clock timings (breaks byte-reproducibility)
        #[arg(long)]
        timings: bool,
        /// Default tolerance for checking tasks without an explicit one
        #[arg(long)]
        tol: Option<f64>,
        /// Default sample count override
        #[arg(long)]
        samples: Option<usize>,
        /// Default finite-difference step override
        #[arg(long)]
        eps: Option<f64>,
        /// Default polynomial degree bound override
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Run the built-in acceptance suite
    Suite {
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Check { manifest } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", manifest.display());
                    return ExitCode::from(2);
                }
            };
            match parse_manifest(&text) {
                Ok(m) => {
                    println!(
                        "manifest version {}: {} object(s), {} task(s)",
                        m.version,
                        m.objects.len(),
                        m.tasks.len()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Cmd::Run {
            manifest,
            format,
            timings,
            tol,
            samples,
            eps,
            degree,
        } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", manifest.display());
                    return ExitCode::from(2);
                }
            };
            let parsed = match parse_manifest(&text) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions {
                timings,
                tol,
                samples,
                eps,
                degree,
            };
            let report = run_with(&parsed, &opts);
            print!("{}", emit_report(&report, format.into()));
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Suite { format } => {
            let outcomes = suite::run_all();
            let report = Report {
                version: env!("CARGO_PKG_VERSION").into(),
                tasks: outcomes
                    .iter()
                    .map(|c| TaskReport {
                        index: c.id - 1,
                        command: format!("suite:{}", c.name),
                        status: if c.passed { Status::Pass } else { Status::Fail },
                        values: BTreeMap::new(),
                        residuals: BTreeMap::new(),
                        detail: c.detail.clone(),
                        millis: None,
                    })
                    .collect(),
            };
            print!("{}", emit_report(&report, format.into()));
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
