//! Batch front end: one subcommand per numerical module, driven by a
//! versioned TOML config, writing JSON and CSV artifacts.

pub mod config;
mod graph;
mod heat;
pub mod jets;
mod output;
mod prop;
mod pv;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{RunConfig, Target, SCHEMA_VERSION};
pub use output::{Report, Table};

/// Exit status for a completed run with a flagged check.
pub const EXIT_FLAGGED: i32 = 3;
/// Exit status for a rejected config.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for any other failure.
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Geometry(#[from] holo_lattice::GeometryError),
    #[error(transparent)]
    Heat(#[from] holo_heat::HeatError),
    #[error(transparent)]
    Pv(#[from] holo_pv::PvError),
    #[error(transparent)]
    Graph(#[from] holo_graph::GraphError),
    #[error(transparent)]
    Integrator(#[from] holo_integrator::IntegratorError),
    #[error(transparent)]
    Jets(#[from] holo_jets::JetError),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            _ => EXIT_ERROR,
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "holo", version, about = "Reproducible runs of the torus propagator toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults for the subcommand when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Propagator sample cache used by `prop`.
    #[arg(long, global = true, env = "HOLOTORUS_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Heat kernel image/spectral tables and mass check.
    Heat,
    /// Propagator sampling, cache build and defining-equation checks.
    Prop,
    /// Principal value corpus through both routes.
    Pv,
    /// Graph integral cutoff sweeps, extrapolation and invariance suite.
    #[command(name = "graph-int")]
    GraphInt,
    /// Exact jet checks.
    Jets,
}

impl Command {
    pub fn target(self) -> Target {
        match self {
            Command::Heat => Target::Heat,
            Command::Prop => Target::Prop,
            Command::Pv => Target::Pv,
            Command::GraphInt => Target::GraphInt,
            Command::Jets => Target::Jets,
        }
    }
}

/// Paths written by a run together with its report.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub json: PathBuf,
    pub csv: PathBuf,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.flags.is_empty() {
            0
        } else {
            EXIT_FLAGGED
        }
    }
}

pub(crate) struct Context {
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
}

/// Runs one subcommand and writes its artifacts.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let target = cli.command.target();
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default_for(target),
    };
    if config.target != target {
        return Err(CliError::Config(format!(
            "config targets {} but the subcommand is {}",
            config.target.name(),
            target.name()
        )));
    }
    let ctx = Context { seed: cli.seed.or(config.seed).unwrap_or(0), cache_dir: cli.cache_dir.clone() };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let stem = config.output.as_ref().and_then(|o| o.stem.clone()).unwrap_or_else(|| target.name().to_string());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let (body, table) = pool.install(|| match target {
        Target::Heat => heat::run(&config.heat_block(), &ctx),
        Target::Prop => prop::run(&config.prop_block(), &ctx),
        Target::Pv => pv::run(&config.pv_block(), &ctx),
        Target::GraphInt => graph::run(&config.graph_int_block(), &ctx),
        Target::Jets => jets::run(&config.jets_block(), &ctx),
    })?;
    let report = Report {
        target: target.name().to_string(),
        schema_version: SCHEMA_VERSION,
        config_hash: config.hash(),
        seed: ctx.seed,
        wall_time: start.elapsed().as_secs_f64(),
        flags: body.flags,
        notes: body.notes,
        results: body.results,
    };
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let json = out_dir.join(format!("{stem}.json"));
    let csv = out_dir.join(format!("{stem}.csv"));
    report.write_json(&json)?;
    table.write(&csv)?;
    Ok(Outcome { report, json, csv })
}

/// Results of one module run before the common header is attached.
pub(crate) struct Body {
    pub results: serde_json::Value,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}
