//! Harness library behind the `qsample` binary: file formats, the scaling
//! experiment runner, oracle-side analysis, and the verification suites.

pub mod analysis;
pub mod cli;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod files;
pub mod selftest;

pub use error::{HarnessError, Result};
