//! Tokenization, lexical resources and feature extraction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::{Error, Result};

mod dictionary;
mod lexicon;
mod ngram;
mod trait_model;

pub use dictionary::{category_proportions, CategoryDictionary, CategoryProfile};
pub use lexicon::{topic_loadings, weighted_scores, CategoryScores, TopicLoadings, WeightedLexicon};
pub use ngram::extract_ngrams;
pub use trait_model::LinearTraitModel;

/// Lowercased word tokens of one text unit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSequence(Vec<String>);

impl TokenSequence {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenSequence(tokens)
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    /// Appends another unit's tokens.
    pub fn extend(&mut self, other: &TokenSequence) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl Deref for TokenSequence {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSequence(iter.into_iter().map(Into::into).collect())
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits text into lowercase tokens.
///
/// A token is a maximal run of letters, digits and apostrophes; everything
/// else separates tokens. Typographic apostrophes are folded to `'`.
pub fn tokenize(text: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if is_apostrophe(c) {
            current.push('\'');
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenSequence(tokens)
}

/// Which feature extractor produced a vector (and which a model expects).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureSpace {
    Ngram,
    Topic,
    Combined,
}

impl FeatureSpace {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSpace::Ngram => "ngram",
            FeatureSpace::Topic => "topic",
            FeatureSpace::Combined => "combined",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureSpace> {
        match s {
            "ngram" => Some(FeatureSpace::Ngram),
            "topic" => Some(FeatureSpace::Topic),
            "combined" => Some(FeatureSpace::Combined),
            _ => None,
        }
    }
}

/// Sparse named features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub space: FeatureSpace,
    pub values: BTreeMap<String, f64>,
}

impl FeatureVector {
    pub fn new(space: FeatureSpace) -> Self {
        FeatureVector {
            space,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values(space: FeatureSpace, values: BTreeMap<String, f64>) -> Self {
        FeatureVector { space, values }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.values.get(name).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Joins n-gram and topic features into the combined space.
    pub fn combine(ngrams: &FeatureVector, topics: &FeatureVector) -> Result<FeatureVector> {
        if ngrams.space != FeatureSpace::Ngram {
            return Err(Error::FeatureSpaceMismatch {
                expected: FeatureSpace::Ngram.as_str(),
                found: ngrams.space.as_str(),
            });
        }
        if topics.space != FeatureSpace::Topic {
            return Err(Error::FeatureSpaceMismatch {
                expected: FeatureSpace::Topic.as_str(),
                found: topics.space.as_str(),
            });
        }
        let mut values = ngrams.values.clone();
        for (k, v) in &topics.values {
            *values.entry(k.clone()).or_insert(0.0) += v;
        }
        Ok(FeatureVector {
            space: FeatureSpace::Combined,
            values,
        })
    }
}
