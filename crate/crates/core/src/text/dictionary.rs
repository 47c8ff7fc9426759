use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::TokenSequence;
use crate::{Error, Result};

/// Category dictionary with literal entries and terminal-`*` prefix patterns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoryDictionary {
    categories: Vec<String>,
    literals: BTreeMap<String, Vec<usize>>,
    prefixes: BTreeMap<String, Vec<usize>>,
}

impl CategoryDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_categories<S: AsRef<str>>(categories: &[S]) -> Self {
        let mut dict = Self::new();
        for c in categories {
            dict.category_id(c.as_ref());
        }
        dict
    }

    fn category_id(&mut self, category: &str) -> usize {
        match self.categories.iter().position(|c| c == category) {
            Some(i) => i,
            None => {
                self.categories.push(category.to_string());
                self.categories.len() - 1
            }
        }
    }

    /// Registers `pattern` under `category`. `walk*` matches any token
    /// starting with `walk`; anything else matches literally.
    pub fn add(&mut self, pattern: &str, category: &str) -> Result<()> {
        let pattern = pattern.trim().to_lowercase();
        if pattern.is_empty() {
            return Err(Error::InvalidPattern(pattern));
        }
        if category.is_empty() {
            return Err(Error::InvalidArgument("empty category name".into()));
        }
        let (stem, wildcard) = match pattern.strip_suffix('*') {
            Some(stem) => (stem, true),
            None => (pattern.as_str(), false),
        };
        if stem.contains('*') {
            return Err(Error::InvalidPattern(pattern));
        }
        let id = self.category_id(category);
        let table = if wildcard {
            &mut self.prefixes
        } else {
            &mut self.literals
        };
        let slot = table.entry(stem.to_string()).or_default();
        if !slot.contains(&id) {
            slot.push(id);
        }
        Ok(())
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn pattern_count(&self) -> usize {
        self.literals.len() + self.prefixes.len()
    }

    /// Sorted, deduplicated category indices matched by `token`.
    pub fn matches(&self, token: &str) -> Vec<usize> {
        let mut out = Vec::new();
        if let Some(ids) = self.literals.get(token) {
            out.extend_from_slice(ids);
        }
        if !self.prefixes.is_empty() {
            let boundaries = token
                .char_indices()
                .map(|(i, _)| i)
                .chain(core::iter::once(token.len()));
            for end in boundaries {
                if let Some(ids) = self.prefixes.get(&token[..end]) {
                    out.extend_from_slice(ids);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Literal and wildcard patterns with their categories, for serialization.
    pub fn patterns(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (stem, ids) in &self.literals {
            for &id in ids {
                out.push((stem.clone(), self.categories[id].clone()));
            }
        }
        for (stem, ids) in &self.prefixes {
            for &id in ids {
                out.push((alloc::format!("{stem}*"), self.categories[id].clone()));
            }
        }
        out
    }
}

/// Share of tokens falling in each dictionary category.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryProfile {
    pub categories: Vec<String>,
    pub proportions: Vec<f64>,
    pub token_count: usize,
}

impl CategoryProfile {
    /// Empty text: every proportion is 0 and carries no information.
    pub fn is_degenerate(&self) -> bool {
        self.token_count == 0
    }

    pub fn get(&self, category: &str) -> Option<f64> {
        self.categories
            .iter()
            .position(|c| c == category)
            .map(|i| self.proportions[i])
    }
}

/// `(# tokens matching category c) / (# tokens)` for every category.
pub fn category_proportions(tokens: &TokenSequence, dict: &CategoryDictionary) -> CategoryProfile {
    let mut counts = vec![0usize; dict.categories.len()];
    for tok in tokens.iter() {
        for c in dict.matches(tok) {
            counts[c] += 1;
        }
    }
    let total = tokens.len();
    CategoryProfile {
        categories: dict.categories.clone(),
        proportions: counts
            .into_iter()
            .map(|c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect(),
        token_count: total,
    }
}
