//! Command-line companion to `tic-core`: file formats, run configuration,
//! experiments and reports.

pub mod cli;
pub mod config;
pub mod error;
pub mod interp;
pub mod report;
pub mod run;
pub mod synthetic;
pub mod tabular;
pub mod templates;
pub mod treefile;
pub mod uci;
