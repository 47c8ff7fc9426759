use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;

use super::{FeatureSpace, FeatureVector, TokenSequence};
use crate::{Error, Result};

/// Relative frequencies of 1..=`n_max`-grams.
///
/// N-grams are counted inside each unit only. Each order is normalized by
/// its own total, so the unigram features sum to 1, the bigram features sum
/// to 1, and so on.
pub fn extract_ngrams(units: &[TokenSequence], n_max: usize) -> Result<FeatureVector> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut totals = vec![0usize; n_max];
    // order of each distinct n-gram, so normalization knows its denominator
    let mut order_of: BTreeMap<String, usize> = BTreeMap::new();

    for unit in units {
        for n in 1..=n_max.min(unit.len()) {
            for window in unit.windows(n) {
                let gram = window.join(" ");
                totals[n - 1] += 1;
                *counts.entry(gram.clone()).or_insert(0) += 1;
                order_of.entry(gram).or_insert(n);
            }
        }
    }

    let values = counts
        .into_iter()
        .map(|(gram, c)| {
            let total = totals[order_of[&gram] - 1];
            (gram, c as f64 / total as f64)
        })
        .collect();
    Ok(FeatureVector::from_values(FeatureSpace::Ngram, values))
}
