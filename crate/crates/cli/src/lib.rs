//! Command-line driver for ABC-PT experiments.
//!
//! The `abcpt` binary is a thin layer over this library: [`config`] parses
//! and resolves a run, [`run::cmd_run`] executes it and writes the
//! artifacts, [`diagnose::cmd_diagnose`] builds tables from a stored trace
//! and [`validate::cmd_validate`] checks the implementation against
//! analytic oracles.

pub mod config;
pub mod diagnose;
pub mod error;
pub mod run;
pub mod tables;
pub mod validate;

pub use config::{Algorithm, Overrides, Preset, RunSpec};
pub use error::{CliError, Result};
