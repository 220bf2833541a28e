//! Experiment harness behind the `fedmm` binary: config parsing, run
//! orchestration and CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod trace_csv;
