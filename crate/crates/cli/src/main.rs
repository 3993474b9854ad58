use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use qclab::pipeline::{run_pipeline, ExperimentConfig, LevelsConfig, PipelineKind};

/// Reproduce the stadium and ring counterexamples to quasiconcavity.
///
/// Exit status is 0 when every check passes and a non-convexity witness was
/// found, 1 when the run completes otherwise, and 2 on errors.
#[derive(Debug, Parser)]
#[command(name = "qclab", version)]
struct Args {
    /// TOML experiment configuration; defaults are used when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// stadium, ring or sweep (overrides the config).
    #[arg(long, value_name = "NAME")]
    pipeline: Option<PipelineKind>,
    /// Output directory (overrides the config).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Level grid "a:b:n" for the superlevel scan (overrides the config).
    #[arg(long, value_name = "A:B:N")]
    levels: Option<String>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn run(args: Args) -> anyhow::Result<bool> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = args.pipeline {
        cfg.pipeline = p;
    }
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    if let Some(l) = &args.levels {
        cfg.levels = LevelsConfig::parse_triplet(l, cfg.levels.tol)?;
    }
    cfg.validate()?;
    if args.print_config {
        print!("{}", cfg.to_toml());
        return Ok(true);
    }
    let report = run_pipeline(&cfg)
        .with_context(|| format!("{} pipeline failed", cfg.pipeline.name()))?;
    print!("{report}");
    Ok(report.success())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
