//! Command-line front end for `augdual-core`: synthetic instance
//! generation, experiment execution from JSON configs, trace/report files,
//! KKT checks of stored solutions, and the seeded verification suites.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod error;
pub mod experiment;
pub mod files;
pub mod instance;
pub mod trace;

pub use config::{load_config, ExperimentConfig, TauSource};
pub use error::{CliError, CliResult};
pub use experiment::{check_solution, run_experiment, Report, SolutionFile};
pub use instance::{generate_instance, load_instance, save_instance, Instance, InstanceSpec};
pub use trace::{emit_trace, read_trace};
