//! The five dialog metrics and the tables that hold their values.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Level, UnitKey};

mod emotion;
mod score;
mod style;
mod traits;

pub use emotion::{
    emotion_matching, emotion_vector, emotional_entropy, EmotionLexicon, EmotionVector,
    EntropyBase, PLUTCHIK,
};
pub use score::{score_corpus, score_dialog, Metric, Resources, ScoreConfig, ScoredCorpus};
pub use style::{language_style_matching, LSM_EPSILON};
pub use traits::{apply_trait_model, cross_validate_ridge, train_ridge, CrossValidation};

/// Why a metric has no value for a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegenerateReason {
    EmptyText,
    ZeroEmotionVector,
    ConstantVector,
    NoPartnerTurn,
}

impl DegenerateReason {
    pub const ALL: [DegenerateReason; 4] = [
        DegenerateReason::EmptyText,
        DegenerateReason::ZeroEmotionVector,
        DegenerateReason::ConstantVector,
        DegenerateReason::NoPartnerTurn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DegenerateReason::EmptyText => "empty_text",
            DegenerateReason::ZeroEmotionVector => "zero_emotion_vector",
            DegenerateReason::ConstantVector => "constant_vector",
            DegenerateReason::NoPartnerTurn => "no_partner_turn",
        }
    }

    pub fn parse(s: &str) -> Option<DegenerateReason> {
        Self::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

/// A metric value, or the reason it is missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scored {
    Value(f64),
    Missing(DegenerateReason),
}

impl Scored {
    pub fn value(self) -> Option<f64> {
        match self {
            Scored::Value(v) => Some(v),
            Scored::Missing(_) => None,
        }
    }

    pub fn reason(self) -> Option<DegenerateReason> {
        match self {
            Scored::Value(_) => None,
            Scored::Missing(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub unit: UnitKey,
    pub metric: String,
    pub value: Scored,
}

impl MetricValue {
    pub fn new(unit: UnitKey, metric: impl Into<String>, value: Scored) -> Self {
        MetricValue {
            unit,
            metric: metric.into(),
            value,
        }
    }

    pub fn value(unit: UnitKey, metric: impl Into<String>, v: f64) -> Self {
        Self::new(unit, metric, Scored::Value(v))
    }
}

/// Long-format metric rows for one level.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    pub level: Level,
    pub rows: Vec<MetricValue>,
}

impl MetricTable {
    pub fn new(level: Level) -> Self {
        MetricTable {
            level,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: MetricValue) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends another table's rows.
    pub fn extend(&mut self, other: MetricTable) {
        self.rows.extend(other.rows);
    }

    /// Metric names in first-appearance order.
    pub fn metric_names(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        self.rows
            .iter()
            .filter(|r| seen.insert(r.metric.as_str()))
            .map(|r| r.metric.clone())
            .collect()
    }

    pub fn has_metric(&self, metric: &str) -> bool {
        self.rows.iter().any(|r| r.metric == metric)
    }

    /// Non-missing values of one metric by unit.
    pub fn column(&self, metric: &str) -> BTreeMap<UnitKey, f64> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric)
            .filter_map(|r| r.value.value().map(|v| (r.unit.clone(), v)))
            .collect()
    }

    /// First `(unit, metric)` pair that appears twice, if any.
    pub fn find_duplicate(&self) -> Option<(&UnitKey, &str)> {
        let mut seen = BTreeSet::new();
        self.rows
            .iter()
            .find(|r| !seen.insert((&r.unit, r.metric.as_str())))
            .map(|r| (&r.unit, r.metric.as_str()))
    }

    /// Missing-row counts per reason.
    pub fn degenerate_counts(&self) -> BTreeMap<DegenerateReason, usize> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            if let Some(reason) = r.value.reason() {
                *out.entry(reason).or_insert(0) += 1;
            }
        }
        out
    }
}
