//! Configuration, orchestration and artifact output for the predator
//! front simulator.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod error;
pub mod plots;
pub mod run;

pub use config::{load_config, save_config, Mode, RunConfig};
pub use error::CliError;
pub use plots::emit_plots;
pub use run::{run, RunOptions, RunOutcome};
