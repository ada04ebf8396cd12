//! `biham`: verifies bihamiltonian systems of hydrodynamic type and their
//! linear reciprocal transformations.
//!
//! Exit status is 0 when every executed check passes, 1 when a check fails or
//! is inconclusive or a mathematical precondition is violated, and 2 for
//! unreadable or malformed input.

mod definition;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use biham_core::fixtures::Example;
use biham_core::pipeline::{run_check, run_transform};
use biham_core::{CoreError, Report, Status};
use clap::{Parser, Subcommand, ValueEnum};
use symkern::ZeroTestConfig;

use crate::definition::{load, parse_seed, ZeroTestOverrides};

#[derive(Debug, Parser)]
#[command(name = "biham", version, about = "Verify bihamiltonian systems of hydrodynamic type")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Working precision of the zero test, in bits.
    #[arg(long, global = true, value_name = "BITS")]
    precision: Option<u32>,
    /// Number of sample points per zero test.
    #[arg(long, global = true, value_name = "N")]
    samples: Option<usize>,
    /// Seed of the sample-point generator, in hexadecimal.
    #[arg(long, global = true, value_name = "HEX", value_parser = parse_seed)]
    seed: Option<u64>,
    /// Record wall-clock time per check.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExampleName {
    Kdv,
    Toda,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural checks of a system definition.
    Check { file: PathBuf },
    /// Apply the transformation of a definition file and verify the results.
    Transform { file: PathBuf },
    /// Run one of the built-in worked examples.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        /// Exponent of the KdV flow `u_t = (m+1)u^m u_x`.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
        m: i64,
        /// Exponent of the commuting KdV flow.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i64).range(1..))]
        k: i64,
    },
}

enum Failure {
    Input(anyhow::Error),
    Math(anyhow::Error),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Math(e.into())
    }
}

fn configure(cli: &Cli, file: &ZeroTestOverrides) -> anyhow::Result<ZeroTestConfig> {
    let mut cfg = ZeroTestConfig::default();
    if let Some(p) = cli.precision.or(file.precision) {
        cfg = cfg.with_precision(p).context("invalid precision")?;
    }
    if let Some(n) = cli.samples.or(file.samples) {
        cfg = cfg.with_samples(n).context("invalid sample count")?;
    }
    if let Some(s) = cli.seed.or(file.seed) {
        cfg = cfg.with_seed(s);
    }
    for (sym, lo, hi) in &file.intervals {
        cfg = cfg.with_interval(sym, lo.clone(), hi.clone()).with_context(|| format!("interval for '{sym}'"))?;
    }
    Ok(cfg)
}

struct Output {
    objects: Option<(String, serde_json::Value)>,
    report: Report,
    cfg: ZeroTestConfig,
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Check { file } | Command::Transform { file } => {
            let def = load(file).map_err(|e| Failure::Input(e.into()))?;
            let cfg = configure(cli, &def.zerotest).map_err(Failure::Input)?;
            if matches!(cli.command, Command::Check { .. }) {
                let out = run_check(&def.system, &cfg)?;
                return Ok(Output { objects: None, report: out.report, cfg });
            }
            if def.system.transform.is_none() {
                return Err(Failure::Input(anyhow::anyhow!("{}: no [transform] section", file.display())));
            }
            let out = run_transform(&def.system, &cfg)?.expect("transform section present");
            Ok(Output {
                objects: Some((render::transform_text(&out), render::transform_json(&out))),
                report: out.report,
                cfg,
            })
        }
        Command::Example { name, m, k } => {
            let example = match name {
                ExampleName::Kdv => Example::kdv(*m, *k),
                ExampleName::Toda => Example::toda(),
            }
            .map_err(|e| Failure::Input(e.into()))?;
            let cfg = example.configure(&configure(cli, &ZeroTestOverrides::default()).map_err(Failure::Input)?);
            let (out, report) = example.run(&cfg)?;
            Ok(Output { objects: Some((render::transform_text(&out), render::transform_json(&out))), report, cfg })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match execute(&cli) {
        Ok(out) => out,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
        Err(Failure::Math(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let mut report = out.report;
    if !cli.timing {
        for c in &mut report.checks {
            c.millis = 0;
        }
    }
    let text = match cli.format {
        Format::Text => {
            let mut s = out.objects.as_ref().map(|(t, _)| format!("{t}\n")).unwrap_or_default();
            s.push_str(&render::report_text(&report, Some(&out.cfg), cli.timing));
            s
        }
        Format::Json => {
            let mut v: serde_json::Value =
                serde_json::from_str(&render::report_json(&report, Some(&out.cfg))).expect("rendered JSON is valid");
            if let Some((_, objects)) = out.objects {
                v["transform"] = objects;
            }
            format!("{v}\n")
        }
    };
    let mut stdout = std::io::stdout().lock();
    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
        return ExitCode::from(2);
    }
    match report.status() {
        Status::Pass | Status::Skipped => ExitCode::SUCCESS,
        Status::Fail | Status::Inconclusive => ExitCode::from(1),
    }
}
