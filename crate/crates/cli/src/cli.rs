//! Command-line surface. Each flag is named after its config key, with
//! underscores turned into dashes.

use std::path::PathBuf;

use clap::Parser;
use serde::Serialize;

use crate::config::{self, Command, ExperimentConfig};
use crate::error::CliError;
use crate::run::{run, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "qsc",
    version,
    about = "Subspace-correction sampling and adiabatic MIS experiments"
)]
pub struct Cli {
    /// Subcommand; defaults to the config's `command` key.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Flat TOML config file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: Flags,
}

/// One optional flag per config key.
#[derive(Debug, Default, Clone, clap::Args, Serialize)]
pub struct Flags {
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,

    /// regular | planar | star
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_class: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    /// Star graph with this many leaves.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_step: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,

    /// Comma-separated hardness values.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// implicit | explicit
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla: Option<String>,

    /// is-edge | one-hot-K | at-most-one-K
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_table: Option<PathBuf>,

    /// Comma-separated Trotter step counts.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_t: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// off | on | both
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qsc: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qsc_interval: Option<usize>,
    /// linear | literal-rate
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_convention: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<bool>,
    /// log-log | lin-lin | lin-log | log-lin (x then y)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot_input: Option<PathBuf>,
}

impl Flags {
    pub fn to_table(&self) -> Result<toml::Table, CliError> {
        toml::Table::try_from(self)
            .map_err(|e| CliError::Config(format!("command-line flags: {e}")))
    }
}

impl Cli {
    /// Effective configuration and command.
    pub fn resolve(&self) -> Result<(ExperimentConfig, Command), CliError> {
        let overrides = self.flags.to_table()?;
        let cfg = match &self.config {
            Some(path) => config::load(path, overrides)?,
            None => config::resolve(None, overrides)?,
        };
        let command = self.command.unwrap_or(cfg.command);
        Ok((cfg, command))
    }

    pub fn execute(&self) -> Result<RunReport, CliError> {
        let (cfg, command) = self.resolve()?;
        run(&cfg, command)
    }
}
