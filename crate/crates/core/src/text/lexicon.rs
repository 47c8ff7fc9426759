use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{FeatureSpace, FeatureVector, TokenSequence};
use crate::{Error, Result};

/// Term → category → weight table.
///
/// Emotion lexicons and topic models share this shape; for a topic model
/// the categories are topic ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedLexicon {
    pub name: String,
    pub description: String,
    categories: Vec<String>,
    category_index: BTreeMap<String, usize>,
    entries: BTreeMap<String, Vec<(usize, f64)>>,
}

impl WeightedLexicon {
    pub fn new(name: impl Into<String>) -> Self {
        WeightedLexicon {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Starts from a declared category list; categories may still be added
    /// by later entries.
    pub fn with_categories<S: AsRef<str>>(name: impl Into<String>, categories: &[S]) -> Self {
        let mut lex = WeightedLexicon::new(name);
        for c in categories {
            lex.category_id(c.as_ref());
        }
        lex
    }

    fn category_id(&mut self, category: &str) -> usize {
        if let Some(&id) = self.category_index.get(category) {
            return id;
        }
        let id = self.categories.len();
        self.categories.push(category.to_string());
        self.category_index.insert(category.to_string(), id);
        id
    }

    /// Adds a weight; repeated `(term, category)` pairs accumulate.
    pub fn add(&mut self, term: &str, category: &str, weight: f64) -> Result<()> {
        if !weight.is_finite() {
            return Err(Error::NonFinite(format!("weight for `{term}`/`{category}`")));
        }
        if category.is_empty() {
            return Err(Error::InvalidArgument("empty category name".into()));
        }
        let id = self.category_id(category);
        let slot = self.entries.entry(term.to_lowercase()).or_default();
        match slot.iter_mut().find(|(c, _)| *c == id) {
            Some((_, w)) => *w += weight,
            None => slot.push((id, weight)),
        }
        Ok(())
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.category_index.get(category).copied()
    }

    /// Number of distinct terms.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, term: &str, category: &str) -> f64 {
        let Some(id) = self.category_index(category) else {
            return 0.0;
        };
        self.entries
            .get(term)
            .and_then(|ws| ws.iter().find(|(c, _)| *c == id))
            .map_or(0.0, |(_, w)| *w)
    }

    /// `(category index, weight)` pairs for a term.
    pub fn term_weights(&self, term: &str) -> &[(usize, f64)] {
        self.entries.get(term).map_or(&[], Vec::as_slice)
    }

    /// All `(term, category, weight)` triples in term order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> + '_ {
        self.entries.iter().flat_map(move |(t, ws)| {
            ws.iter()
                .map(move |(c, w)| (t.as_str(), self.categories[*c].as_str(), *w))
        })
    }
}

/// Per-category values aligned with a resource's category list.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryScores<'a> {
    pub categories: &'a [String],
    pub values: Vec<f64>,
}

impl CategoryScores<'_> {
    pub fn get(&self, category: &str) -> Option<f64> {
        self.categories
            .iter()
            .position(|c| c == category)
            .map(|i| self.values[i])
    }

    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.categories
            .iter()
            .cloned()
            .zip(self.values.iter().copied())
            .collect()
    }
}

/// Sum of lexicon weights over tokens, per category. Unknown tokens add 0.
pub fn weighted_scores<'a>(tokens: &TokenSequence, lex: &'a WeightedLexicon) -> CategoryScores<'a> {
    let mut values = vec![0.0; lex.categories.len()];
    for tok in tokens.iter() {
        for &(c, w) in lex.term_weights(tok) {
            values[c] += w;
        }
    }
    CategoryScores {
        categories: &lex.categories,
        values,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicLoadings {
    pub loadings: FeatureVector,
    /// No tokens, or no token carried any topic weight.
    pub degenerate: bool,
}

/// `loading(t) = Σ_w relfreq(w) · weight(w, t)`, one feature per topic.
pub fn topic_loadings(tokens: &TokenSequence, topics: &WeightedLexicon) -> TopicLoadings {
    let mut values = vec![0.0; topics.categories.len()];
    let mut hits = 0usize;
    for tok in tokens.iter() {
        let ws = topics.term_weights(tok);
        if !ws.is_empty() {
            hits += 1;
        }
        for &(c, w) in ws {
            values[c] += w;
        }
    }
    let total = tokens.len() as f64;
    let loadings = topics
        .categories
        .iter()
        .zip(values)
        .map(|(name, v)| (name.clone(), if total > 0.0 { v / total } else { 0.0 }))
        .collect();
    TopicLoadings {
        loadings: FeatureVector::from_values(FeatureSpace::Topic, loadings),
        degenerate: hits == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn emotion_fixture() -> WeightedLexicon {
        let mut lex = WeightedLexicon::with_categories("fixture", &["joy", "sadness", "anger"]);
        lex.add("happy", "joy", 2.0).unwrap();
        lex.add("sad", "sadness", 1.5).unwrap();
        lex
    }

    #[test]
    fn hand_sum() {
        let lex = emotion_fixture();
        let s = weighted_scores(&tokenize("happy happy sad"), &lex);
        assert_eq!(s.get("joy"), Some(4.0));
        assert_eq!(s.get("sadness"), Some(1.5));
        assert_eq!(s.get("anger"), Some(0.0));
    }

    #[test]
    fn empty_and_unknown_are_zero() {
        let lex = emotion_fixture();
        assert!(weighted_scores(&tokenize(""), &lex).values.iter().all(|v| *v == 0.0));
        assert!(weighted_scores(&tokenize("xyz qqq"), &lex).values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn duplicates_accumulate() {
        let mut lex = WeightedLexicon::new("dup");
        lex.add("happy", "joy", 1.0).unwrap();
        lex.add("happy", "joy", 1.0).unwrap();
        assert_eq!(lex.weight("happy", "joy"), 2.0);
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn terms_are_lowercased() {
        let mut lex = WeightedLexicon::new("case");
        lex.add("Happy", "joy", 1.0).unwrap();
        assert_eq!(lex.weight("happy", "joy"), 1.0);
    }

    #[test]
    fn rejects_non_finite() {
        let mut lex = WeightedLexicon::new("nan");
        assert!(lex.add("a", "b", f64::NAN).is_err());
        assert!(lex.add("a", "b", f64::INFINITY).is_err());
    }

    #[test]
    fn loadings_example() {
        let mut topics = WeightedLexicon::new("topics");
        topics.add("cat", "T0", 1.0).unwrap();
        let l = topic_loadings(&tokenize("cat cat dog"), &topics);
        assert!((l.loadings.get("T0") - 2.0 / 3.0).abs() < 1e-15);
        assert!(!l.degenerate);
    }

    #[test]
    fn loadings_without_hits_flag() {
        let mut topics = WeightedLexicon::new("topics");
        topics.add("cat", "T0", 1.0).unwrap();
        topics.add("mouse", "T1", 0.5).unwrap();
        let l = topic_loadings(&tokenize("dog bird"), &topics);
        assert!(l.degenerate);
        assert_eq!(l.loadings.len(), 2);
        assert!(l.loadings.values.values().all(|v| *v == 0.0));
        assert!(topic_loadings(&tokenize(""), &topics).degenerate);
    }

    #[test]
    fn loadings_invariant_under_repetition() {
        let mut topics = WeightedLexicon::new("topics");
        topics.add("cat", "a", 0.3).unwrap();
        topics.add("dog", "a", 0.1).unwrap();
        topics.add("dog", "b", 0.7).unwrap();
        let once = topic_loadings(&tokenize("cat dog fish dog"), &topics);
        let twice = topic_loadings(&tokenize("cat dog fish dog cat dog fish dog"), &topics);
        for (k, v) in &once.loadings.values {
            assert!((v - twice.loadings.get(k)).abs() < 1e-15);
        }
    }
}
