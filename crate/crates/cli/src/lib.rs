//! Orchestration of the theory, simulated-experiment and report commands.

pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod theory;

pub use config::RunConfig;
pub use error::{CliError, CliResult, Stage};
pub use report::{build_report, Report, Summary};
pub use run::{run_pipeline, ChangeBlock, Estimate, ExperimentBlock, RunOutput, StateEstimate};
pub use theory::{compute_theory, discrepancy_flags, StateTheory, TheoryBlock};
