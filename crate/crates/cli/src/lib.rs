//! Experiment runner for step-reinforced walks: config resolution, CSV and
//! JSON emission, and the acceptance suites behind `srrw verify`.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod suites;

pub use args::{Cli, Command};
pub use commands::run;
