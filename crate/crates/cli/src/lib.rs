//! Batch front-end for the `qsc-core` experiments: flat TOML configs,
//! deterministic CSV/JSON artifacts, run summaries and SVG scaling plots.

pub mod cli;
pub mod config;
pub mod error;
pub mod run;
pub mod summary;
pub mod svg;

pub use cli::{Cli, Flags};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use run::{run, RunReport};
pub use summary::{summarize, SummaryRow};
pub use svg::{emit_svg, Axes, Scale};
