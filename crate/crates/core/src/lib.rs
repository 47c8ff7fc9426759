//! Psychologically grounded dialog metrics.
//!
//! This crate holds the pure algorithmic half of `psylex`: tokenization and
//! lexicon application, the five dialog metrics (emotional entropy, emotion
//! matching, language style matching, agreeableness and empathy), annotation
//! agreement, and the statistics behind the evaluation harness (correlation,
//! least squares, paired t-tests, clustering order, normalized profiles).
//!
//! It is `no_std` and only needs `alloc`. File formats, configuration and the
//! command line live in the `psylex` crate.
//!
//! The data model is hierarchical: a [`Corpus`](corpus::Corpus) holds
//! [`Dialog`](corpus::Dialog)s which hold [`Turn`](corpus::Turn)s. Metrics are
//! computed per agent turn and per dialog and land in a
//! [`MetricTable`](metrics::MetricTable) for each level.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod error;
pub mod metrics;
pub mod report;
pub mod stats;
pub mod text;

pub use error::{Error, Result};
