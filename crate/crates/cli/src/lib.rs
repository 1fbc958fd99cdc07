//! Scenario driver for `nkgeom-core`: parses a scenario file, runs the
//! selected checks on a model and writes a line-oriented report with a JSON
//! mirror.

pub mod config;
pub mod report;
pub mod scenario;

pub use config::{CheckKind, ConfigError, ModelKind, ScenarioConfig};
pub use report::{CheckRecord, Report, Status};
pub use scenario::{build_model, run_scenario, ModelData, ScenarioError, ScenarioOutcome};
