//! Config-driven batch front-end: single runs, parameter sweeps and
//! validation suites.

pub mod config;
pub mod run;
pub mod sweep;
pub mod validate;

pub use config::AnalysisConfig;
pub use run::{run, write_outputs, ResultRow, RunOutcome, RunReport};
pub use sweep::{sweep, sweep_csv, Axis, Cell};
pub use validate::{validate, validate_suite, Case, Check, CheckRow, Compare, Status, Suite, ValidationReport, SUITES};
