//! Command-line front end: configuration, trajectory files and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Invocation;
use crate::config::{CommandName, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "igame",
    version,
    about = "Simulate and analyse 2-person differential interactive games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a scenario and write its trajectory CSV.
    Simulate(CommonArgs),
    /// Recover the ε-parameters of a trajectory.
    Estimate(CommonArgs),
    /// Frozen-ε predictions from one or more anchors.
    Predict(CommonArgs),
    /// Run a dialogue scenario and report its transcript.
    Dialogue(CommonArgs),
    /// Unravel a hidden dialogue; `--scenario all` tabulates the catalog.
    Verbalize(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "igame-out")]
    pub out: PathBuf,
    /// Scenario seed; overrides the config.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Scenario name; overrides the config.
    #[arg(long, value_name = "NAME")]
    pub scenario: Option<String>,
}

impl Cli {
    /// Resolves flags and the config file into one invocation.
    pub fn invocation(self) -> anyhow::Result<Invocation> {
        let (command, args) = match self.command {
            Command::Simulate(a) => (CommandName::Simulate, a),
            Command::Estimate(a) => (CommandName::Estimate, a),
            Command::Predict(a) => (CommandName::Predict, a),
            Command::Dialogue(a) => (CommandName::Dialogue, a),
            Command::Verbalize(a) => (CommandName::Verbalize, a),
        };
        let mut config = match &args.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if args.scenario.is_some() {
            config.scenario = args.scenario;
        }
        if args.seed.is_some() {
            config.overrides.seed = args.seed;
        }
        Ok(Invocation {
            command,
            config,
            out: args.out,
        })
    }
}

pub fn run(cli: Cli) -> anyhow::Result<Vec<PathBuf>> {
    commands::execute(&cli.invocation()?)
}
