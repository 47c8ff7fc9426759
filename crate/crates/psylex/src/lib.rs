//! File formats, configuration and the command line for `psylex`.
//!
//! The algorithms live in [`psylex_core`]; this crate reads corpora and
//! resources from disk, runs the scoring pipeline on a worker pool and writes
//! deterministic CSV and JSON artifacts.

pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod format;
pub mod io;

pub use error::{Error, Result};
pub use psylex_core as core;
