//! Experiment harness behind the `loctrig` binary: dataset generators,
//! experiment pipelines, CSV import/export, and the JSON run report.
//!
//! The binary front-end lives in `main.rs`; everything here is a library
//! so tests and benchmarks can drive the same pipelines directly.

pub mod csvio;
pub mod error;
pub mod experiments;
pub mod gen;
pub mod report;

pub use error::{Error, Result};
