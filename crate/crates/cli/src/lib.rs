//! Batch front end for the semigroup laboratory: scenario registry,
//! configuration handling, analysis pipeline and deterministic reports.

pub mod config;
pub mod pipeline;
pub mod registry;
pub mod report;

pub use config::{CliError, Overrides};
pub use pipeline::{run_scenario, run_sweep, ScenarioReport, SweepParam};
pub use registry::{build_generator, find, resolve, ResolvedConfig, ScenarioMeta, SCENARIOS};
