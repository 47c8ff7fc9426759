use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Corpus, Level, UnitKey};
use crate::metrics::{MetricTable, MetricValue};
use crate::{Error, Result};

/// One externally computed metric score. `turn_id: None` is dialog-level.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScore {
    pub dialog_id: String,
    pub turn_id: Option<String>,
    pub metric_name: String,
    pub value: f64,
}

pub type ExternalScoreTable = Vec<ExternalScore>;

/// Turns external scores into turn and dialog metric tables.
///
/// Turn rows are copied. A dialog gets an explicit dialog-level row when one
/// is supplied, otherwise the mean of its turn rows for that metric.
pub fn attach_external_scores(corpus: &Corpus, table: &[ExternalScore]) -> Result<(MetricTable, MetricTable)> {
    let mut unresolved = Vec::new();
    let mut turn_values: BTreeMap<(UnitKey, &str), f64> = BTreeMap::new();
    let mut dialog_values: BTreeMap<(UnitKey, &str), f64> = BTreeMap::new();
    let mut metrics: Vec<&str> = Vec::new();

    for row in table {
        if row.metric_name.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "empty metric name for {}",
                row.dialog_id
            )));
        }
        if !row.value.is_finite() {
            return Err(Error::NonFinite(format!("external score `{}`", row.metric_name)));
        }
        let key = UnitKey {
            dialog_id: row.dialog_id.clone(),
            turn_id: row.turn_id.clone(),
        };
        if !corpus.resolves(&key) {
            unresolved.push(format!("{key} ({})", row.metric_name));
            continue;
        }
        if !metrics.contains(&row.metric_name.as_str()) {
            metrics.push(&row.metric_name);
        }
        let target = match key.level() {
            Level::Turn => &mut turn_values,
            Level::Dialog => &mut dialog_values,
        };
        let name = format!("{key}:{}", row.metric_name);
        if target.insert((key, row.metric_name.as_str()), row.value).is_some() {
            return Err(Error::DuplicateId {
                kind: "external score",
                id: name,
            });
        }
    }
    if !unresolved.is_empty() {
        return Err(Error::UnresolvedIds(unresolved));
    }

    let mut turn = MetricTable::new(Level::Turn);
    let mut dialog = MetricTable::new(Level::Dialog);
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    metrics.retain(|m| seen.insert(m));

    for d in corpus.dialogs() {
        let dkey = UnitKey::dialog(d.dialog_id.clone());
        for metric in &metrics {
            let mut turn_scores = Vec::new();
            for t in &d.turns {
                let key = UnitKey::turn(d.dialog_id.clone(), t.turn_id.clone());
                if let Some(&v) = turn_values.get(&(key.clone(), *metric)) {
                    turn_scores.push(v);
                    turn.push(MetricValue::value(key, *metric, v));
                }
            }
            let explicit = dialog_values.get(&(dkey.clone(), *metric)).copied();
            let value = explicit.or_else(|| {
                (!turn_scores.is_empty())
                    .then(|| turn_scores.iter().sum::<f64>() / turn_scores.len() as f64)
            });
            if let Some(v) = value {
                dialog.push(MetricValue::value(dkey.clone(), *metric, v));
            }
        }
    }
    Ok((turn, dialog))
}
