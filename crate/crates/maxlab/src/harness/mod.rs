//! Verification harness: configuration, field maps, experiment suites, and
//! report/plot output behind the `maxlab` binary.

pub mod config;
pub mod experiments;
pub mod fields;
pub mod report;
pub mod svg;

pub use config::ExperimentConfig;
pub use experiments::{run, EXPERIMENTS};
pub use report::{ExperimentReport, FailureRecord, Row};
