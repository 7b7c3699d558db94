//! Flat, typed experiment configuration.
//!
//! A config file is a TOML document of top-level keys only. Every key has a
//! default and unknown keys are rejected. The same keys exist as
//! command-line flags (`n_max` is `--n-max`); flags are merged over the
//! file before the document is validated, so a flag and a config line
//! setting the same value are indistinguishable downstream.

use std::fmt;
use std::path::{Path, PathBuf};

use qsc_core::adiabatic::ThetaConvention;
use qsc_core::prs::GraphClass;
use qsc_core::qsc::AncillaMode;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::svg::{Axes, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Classical PRS runtime sweep: raw.csv, summary.csv, scaling.svg.
    #[default]
    Sample,
    /// Quantum preparation on the simulator: qsim.json.
    Qsim,
    /// Stabilizer and syndrome matrices of a constraint: stabilizer.txt.
    Stabilizer,
    /// Trotterized adiabatic MIS with and without correction: adiabatic.csv.
    Adiabatic,
    /// Re-render a summary CSV as an SVG plot.
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ancilla {
    #[default]
    Implicit,
    Explicit,
}

impl From<Ancilla> for AncillaMode {
    fn from(a: Ancilla) -> Self {
        match a {
            Ancilla::Implicit => AncillaMode::Implicit,
            Ancilla::Explicit => AncillaMode::Explicit,
        }
    }
}

/// Which correction settings an adiabatic run covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QscSetting {
    Off,
    On,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theta {
    #[default]
    Linear,
    LiteralRate,
}

impl From<Theta> for ThetaConvention {
    fn from(t: Theta) -> Self {
        match t {
            Theta::Linear => ThetaConvention::Linear,
            Theta::LiteralRate => ThetaConvention::LiteralRate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AxesSetting {
    #[default]
    #[serde(rename = "log-log")]
    LogLog,
    #[serde(rename = "lin-lin")]
    LinLin,
    #[serde(rename = "lin-log")]
    LinLog,
    #[serde(rename = "log-lin")]
    LogLin,
}

impl From<AxesSetting> for Axes {
    fn from(a: AxesSetting) -> Self {
        let (x, y) = match a {
            AxesSetting::LogLog => (Scale::Log, Scale::Log),
            AxesSetting::LinLin => (Scale::Linear, Scale::Linear),
            AxesSetting::LinLog => (Scale::Linear, Scale::Log),
            AxesSetting::LogLin => (Scale::Log, Scale::Linear),
        };
        Axes { x, y }
    }
}

/// All run parameters. Keys not used by the selected command are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Subcommand to run when none is given on the command line.
    pub command: Command,
    /// Base seed; every trial seed is derived from it.
    pub seed: u64,
    /// Directory receiving all artifacts (created if missing).
    pub out_dir: PathBuf,
    /// Worker threads; results do not depend on this.
    pub threads: usize,

    /// Random graph family: `regular`, `planar` or `star`.
    pub graph_class: GraphClass,
    /// Graph file in the `n m` / `i j` text format; overrides generation.
    pub graph_file: Option<PathBuf>,
    /// Star with this many leaves; overrides `graph_class` for single-graph
    /// commands.
    pub star: Option<usize>,
    /// Size range `n_min..=n_max` in steps of `n_step`. Single-graph
    /// commands use `n_min`.
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    /// Degree (regular) or degree bound (planar).
    pub d: usize,

    /// Hardness values; one sweep per value.
    pub lambdas: Vec<f64>,
    /// Halt once at most this fraction of edges is violated.
    pub alpha: Option<f64>,
    /// Round cap; capped trials are reported as censored.
    pub max_rounds: Option<u64>,
    /// Trials per grid point.
    pub trials: u64,
    /// Syndrome readout for `qsim`.
    pub ancilla: Ancilla,

    /// Named constraint for `stabilizer`: `is-edge`, `one-hot-K`,
    /// `at-most-one-K`.
    pub constraint: String,
    /// Truth-table file (2^k lines of 0/1); overrides `constraint`.
    pub truth_table: Option<PathBuf>,

    /// Trotter step counts for `adiabatic`.
    pub n_t: Vec<usize>,
    /// Total time; defaults to n².
    pub total_time: Option<f64>,
    /// Constraint energy scale; defaults to the total time.
    pub delta: Option<f64>,
    pub qsc: QscSetting,
    /// Trotter steps between correction rounds; defaults to
    /// clamp(N_T / 4, 1, 10).
    pub qsc_interval: Option<usize>,
    pub theta_convention: Theta,

    /// Write scaling.svg after a sweep.
    pub svg: bool,
    pub axes: AxesSetting,
    /// Summary CSV read by `plot`; defaults to `out_dir/summary.csv`.
    pub plot_input: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: Command::Sample,
            seed: 1,
            out_dir: PathBuf::from("out"),
            threads: 1,
            graph_class: GraphClass::Regular,
            graph_file: None,
            star: None,
            n_min: 8,
            n_max: 80,
            n_step: 8,
            d: 3,
            lambdas: vec![1.0],
            alpha: None,
            max_rounds: None,
            trials: 100,
            ancilla: Ancilla::Implicit,
            constraint: "is-edge".into(),
            truth_table: None,
            n_t: vec![10, 100, 1000],
            total_time: None,
            delta: None,
            qsc: QscSetting::Both,
            qsc_interval: None,
            theta_convention: Theta::Linear,
            svg: true,
            axes: AxesSetting::LogLog,
            plot_input: None,
        }
    }
}

impl ExperimentConfig {
    /// Sizes of the sweep; empty when `n_min > n_max`.
    pub fn n_values(&self) -> Vec<usize> {
        (self.n_min..=self.n_max)
            .step_by(self.n_step.max(1))
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.threads == 0 {
            return bad("threads must be at least 1".into());
        }
        if self.n_step == 0 {
            return bad("n_step must be at least 1".into());
        }
        if let Some(&l) = self.lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return bad(format!("lambdas must be positive and finite, got {l}"));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return bad(format!("alpha must lie in (0, 1], got {a}"));
            }
        }
        if self.max_rounds == Some(0) {
            return bad("max_rounds must be at least 1".into());
        }
        if self.n_t.contains(&0) {
            return bad("n_t entries must be at least 1".into());
        }
        if self.qsc_interval == Some(0) {
            return bad("qsc_interval must be at least 1".into());
        }
        for (key, v) in [("total_time", self.total_time), ("delta", self.delta)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return bad(format!("{key} must be positive and finite, got {v}"));
                }
            }
        }
        Ok(())
    }
}

/// Error from parsing a config document, carrying the file name.
#[derive(Debug)]
pub struct ConfigParseError {
    pub source_name: String,
    pub message: String,
}

impl fmt::Display for ConfigParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.source_name, self.message)
    }
}

/// Parses a config document on its own, so schema errors carry line and
/// column positions from the original text.
pub fn parse_config(text: &str, source_name: &str) -> Result<ExperimentConfig, CliError> {
    toml::from_str(text).map_err(|e| {
        CliError::Config(
            ConfigParseError {
                source_name: source_name.into(),
                message: e.to_string(),
            }
            .to_string(),
        )
    })
}

/// Merges `overrides` (top-level keys) over the document `text` and
/// deserializes the result.
pub fn resolve(
    text: Option<(&str, &Path)>,
    overrides: toml::Table,
) -> Result<ExperimentConfig, CliError> {
    let mut table = match text {
        Some((text, path)) => {
            let name = path.display().to_string();
            // Validates the file alone first for positioned diagnostics.
            parse_config(text, &name)?;
            text.parse::<toml::Table>()
                .map_err(|e| CliError::Config(format!("{name}: {e}")))?
        }
        None => toml::Table::new(),
    };
    table.extend(overrides);
    let cfg = ExperimentConfig::deserialize(toml::Value::Table(table))
        .map_err(|e| CliError::Config(format!("command-line flags: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load(path: &Path, overrides: toml::Table) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    resolve(Some((&text, path)), overrides)
}
