//! Batch runner for the QND interferometer models: TOML run specs in,
//! CSV tables with a reproducible metadata header out.

pub mod config;
pub mod run;
pub mod table;

pub use config::{validate, Diagnostic, Grid, Mode, RunSpec};
pub use run::{run, RunError};
pub use table::OutputTable;
