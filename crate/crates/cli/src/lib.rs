//! Configuration-driven experiment runner: JSON configs in, CSV/JSON results
//! and a checksummed manifest out.

pub mod catalog;
pub mod config;
pub mod error;
pub mod manifest;
pub mod plotdata;
pub mod runner;

pub use catalog::{list_catalog, CatalogEntry};
pub use config::{ExperimentConfig, Scenario, SCENARIOS};
pub use error::CliError;
pub use manifest::{Outputs, RunManifest};
pub use plotdata::{emit_plotdata, PlotKind};
pub use runner::{run_scenario, RunOptions};
