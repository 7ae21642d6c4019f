//! Command-line front end and experiment harness for the `edgematch`
//! solvers.
//!
//! [`harness`] runs pipelines over many seeds and aggregates the scores;
//! [`cli`] implements the `edgematch` binary on top of it.

pub mod cli;
pub mod harness;

pub use cli::run;
pub use harness::{aggregate, run_bench, ResultRow, RunConfig, RunRecord};
