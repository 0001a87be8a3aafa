//! Configuration, orchestration and output for the `delaycert` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

use std::path::PathBuf;

use delaycert_core::sim::hom_norm_series;

pub use config::{PipelineKind, RunConfig};
pub use error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Growth constants with their provenance.
    Constants,
    /// Certificates of both variants as JSON.
    Certify,
    /// Solution, envelopes and comparison functions as CSV with a check report.
    Compare,
    /// Solution trajectory as CSV.
    Simulate,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub pipeline: Option<PipelineKind>,
}

/// Loads the config (or the built-in reference scenario) and applies flag overrides.
pub fn resolve_config(o: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::reference(),
    };
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(p) = o.pipeline {
        cfg.pipeline = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a command and returns its text output. `Err` carries the exit code.
///
/// The constants report is a table on a terminal and JSON when written to a file.
pub fn run(cmd: Command, cfg: &RunConfig, to_file: bool) -> Result<String, CliError> {
    let prepared = pipeline::prepare(cfg)?;
    Ok(match cmd {
        Command::Constants => {
            let rep = pipeline::constants_report(cfg, &prepared)?;
            if to_file {
                output::to_json(&rep)
            } else {
                output::constants_table(&rep)
            }
        }
        Command::Certify => output::to_json(&pipeline::certify(cfg, &prepared)?),
        Command::Compare => output::compare_csv(&pipeline::compare(cfg, &prepared)?),
        Command::Simulate => {
            let traj = pipeline::simulate(cfg, &prepared)?;
            output::simulate_csv(&traj, &hom_norm_series(&traj, &prepared.model.structure))
        }
    })
}
