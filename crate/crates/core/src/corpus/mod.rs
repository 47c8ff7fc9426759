//! Hierarchical dialog corpora, annotation consensus and agreement.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

mod agreement;
mod external;

pub use agreement::{
    agreement_report, krippendorff_alpha, AgreementReport, Difference, ReliabilityMatrix,
};
pub use external::{attach_external_scores, ExternalScore, ExternalScoreTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Speaker {
    Agent,
    Partner,
}

impl Speaker {
    pub fn as_str(self) -> &'static str {
        match self {
            Speaker::Agent => "agent",
            Speaker::Partner => "partner",
        }
    }

    pub fn parse(s: &str) -> Option<Speaker> {
        match s {
            "agent" => Some(Speaker::Agent),
            "partner" => Some(Speaker::Partner),
            _ => None,
        }
    }
}

/// Turn or dialog granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Turn,
    Dialog,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Turn => "turn",
            Level::Dialog => "dialog",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "turn" => Some(Level::Turn),
            "dialog" => Some(Level::Dialog),
            _ => None,
        }
    }
}

/// One annotator's rating. `value: None` marks a skipped item.
#[derive(Debug, Clone, PartialEq)]
pub struct Rating {
    pub annotator: Option<String>,
    pub value: Option<f64>,
}

impl Rating {
    pub fn new(value: f64) -> Self {
        Rating {
            annotator: None,
            value: Some(value),
        }
    }
}

/// Judgement dimension → ratings, one per annotator.
pub type Annotations = BTreeMap<String, Vec<Rating>>;

fn positional(values: &[f64]) -> Vec<Rating> {
    values.iter().copied().map(Rating::new).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Turn {
    pub turn_id: String,
    pub speaker: Speaker,
    pub text: String,
    pub annotations: Annotations,
}

impl Turn {
    pub fn new(turn_id: impl Into<String>, speaker: Speaker, text: impl Into<String>) -> Self {
        Turn {
            turn_id: turn_id.into(),
            speaker,
            text: text.into(),
            annotations: Annotations::new(),
        }
    }

    /// Adds positional ratings for a dimension.
    pub fn with_ratings(mut self, dimension: &str, values: &[f64]) -> Self {
        self.annotations.insert(dimension.into(), positional(values));
        self
    }

    pub fn is_empty_text(&self) -> bool {
        self.text.trim().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dialog {
    pub dialog_id: String,
    pub system_id: String,
    pub turns: Vec<Turn>,
    pub annotations: Annotations,
}

impl Dialog {
    pub fn new(dialog_id: impl Into<String>, system_id: impl Into<String>, turns: Vec<Turn>) -> Self {
        Dialog {
            dialog_id: dialog_id.into(),
            system_id: system_id.into(),
            turns,
            annotations: Annotations::new(),
        }
    }

    pub fn with_ratings(mut self, dimension: &str, values: &[f64]) -> Self {
        self.annotations.insert(dimension.into(), positional(values));
        self
    }
}

/// Identifies a dialog (`turn_id: None`) or one of its turns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitKey {
    pub dialog_id: String,
    pub turn_id: Option<String>,
}

impl UnitKey {
    pub fn dialog(dialog_id: impl Into<String>) -> Self {
        UnitKey {
            dialog_id: dialog_id.into(),
            turn_id: None,
        }
    }

    pub fn turn(dialog_id: impl Into<String>, turn_id: impl Into<String>) -> Self {
        UnitKey {
            dialog_id: dialog_id.into(),
            turn_id: Some(turn_id.into()),
        }
    }

    pub fn level(&self) -> Level {
        if self.turn_id.is_some() {
            Level::Turn
        } else {
            Level::Dialog
        }
    }
}

impl core::fmt::Display for UnitKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.turn_id {
            Some(t) => write!(f, "{}/{}", self.dialog_id, t),
            None => f.write_str(&self.dialog_id),
        }
    }
}

/// Inclusive rating scale for one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleBounds {
    pub min: f64,
    pub max: f64,
}

impl ScaleBounds {
    pub const LIKERT_5: ScaleBounds = ScaleBounds { min: 1.0, max: 5.0 };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(Error::InvalidArgument(format!(
                "invalid scale bounds [{min}, {max}]"
            )));
        }
        Ok(ScaleBounds { min, max })
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

/// Validated, immutable dialog collection.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub corpus_id: String,
    dialogs: Vec<Dialog>,
    scale_bounds: BTreeMap<String, ScaleBounds>,
    index: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn new(
        corpus_id: impl Into<String>,
        dialogs: Vec<Dialog>,
        scale_bounds: BTreeMap<String, ScaleBounds>,
    ) -> Result<Corpus> {
        let mut b = CorpusBuilder::new(corpus_id, scale_bounds);
        for d in dialogs {
            b.push(d)?;
        }
        Ok(b.finish())
    }

    pub fn dialogs(&self) -> &[Dialog] {
        &self.dialogs
    }

    pub fn dialog(&self, dialog_id: &str) -> Option<&Dialog> {
        self.index.get(dialog_id).map(|&i| &self.dialogs[i])
    }

    pub fn scale_bounds(&self) -> &BTreeMap<String, ScaleBounds> {
        &self.scale_bounds
    }

    pub fn turn_count(&self) -> usize {
        self.dialogs.iter().map(|d| d.turns.len()).sum()
    }

    /// Whether a unit key names a dialog or turn in this corpus.
    pub fn resolves(&self, key: &UnitKey) -> bool {
        match (self.dialog(&key.dialog_id), &key.turn_id) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(d), Some(t)) => d.turns.iter().any(|turn| &turn.turn_id == t),
        }
    }

    /// Turns whose text is empty or whitespace; kept, but flagged.
    pub fn empty_text_turns(&self) -> Vec<UnitKey> {
        self.dialogs
            .iter()
            .flat_map(|d| {
                d.turns
                    .iter()
                    .filter(|t| t.is_empty_text())
                    .map(move |t| UnitKey::turn(d.dialog_id.clone(), t.turn_id.clone()))
            })
            .collect()
    }

    /// Distinct system ids in first-appearance order.
    pub fn systems(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for d in &self.dialogs {
            if !out.contains(&d.system_id.as_str()) {
                out.push(&d.system_id);
            }
        }
        out
    }

    /// Units at `level` with their annotations, in corpus order.
    pub fn units(&self, level: Level) -> Vec<(UnitKey, &Annotations)> {
        let mut out = Vec::new();
        for d in &self.dialogs {
            match level {
                Level::Dialog => out.push((UnitKey::dialog(d.dialog_id.clone()), &d.annotations)),
                Level::Turn => {
                    for t in &d.turns {
                        out.push((
                            UnitKey::turn(d.dialog_id.clone(), t.turn_id.clone()),
                            &t.annotations,
                        ))
                    }
                }
            }
        }
        out
    }

    /// Judgement dimensions annotated at `level`, sorted.
    pub fn dimensions(&self, level: Level) -> Vec<String> {
        let mut dims: Vec<String> = self
            .units(level)
            .into_iter()
            .flat_map(|(_, a)| a.keys().cloned())
            .collect();
        dims.sort();
        dims.dedup();
        dims
    }

    /// Median consensus per unit for one dimension; units without ratings
    /// are left out.
    pub fn consensus(&self, level: Level, dimension: &str) -> BTreeMap<UnitKey, f64> {
        self.units(level)
            .into_iter()
            .filter_map(|(key, ann)| {
                let values: Vec<f64> = ann
                    .get(dimension)?
                    .iter()
                    .filter_map(|r| r.value)
                    .collect();
                consensus_label(&values).map(|v| (key, v))
            })
            .collect()
    }
}

/// Incremental corpus construction with per-dialog validation.
#[derive(Debug, Clone)]
pub struct CorpusBuilder {
    corpus_id: String,
    dialogs: Vec<Dialog>,
    scale_bounds: BTreeMap<String, ScaleBounds>,
    default_scale: Option<ScaleBounds>,
    index: BTreeMap<String, usize>,
}

impl CorpusBuilder {
    pub fn new(corpus_id: impl Into<String>, scale_bounds: BTreeMap<String, ScaleBounds>) -> Self {
        CorpusBuilder {
            corpus_id: corpus_id.into(),
            dialogs: Vec::new(),
            scale_bounds,
            default_scale: None,
            index: BTreeMap::new(),
        }
    }

    /// Undeclared dimensions get these bounds instead of being rejected.
    pub fn default_scale(mut self, bounds: Option<ScaleBounds>) -> Self {
        self.default_scale = bounds;
        self
    }

    pub fn push(&mut self, dialog: Dialog) -> Result<()> {
        if self.index.contains_key(&dialog.dialog_id) {
            return Err(Error::DuplicateId {
                kind: "dialog",
                id: dialog.dialog_id,
            });
        }
        if dialog.turns.is_empty() {
            return Err(Error::EmptyDialog(dialog.dialog_id));
        }
        let mut seen: Vec<&str> = Vec::with_capacity(dialog.turns.len());
        for t in &dialog.turns {
            if seen.contains(&t.turn_id.as_str()) {
                return Err(Error::DuplicateId {
                    kind: "turn",
                    id: format!("{}/{}", dialog.dialog_id, t.turn_id),
                });
            }
            seen.push(&t.turn_id);
        }
        let unit = dialog.dialog_id.clone();
        self.check_annotations(&dialog.annotations, &unit)?;
        for t in &dialog.turns {
            self.check_annotations(&t.annotations, &format!("{}/{}", unit, t.turn_id))?;
        }
        self.index.insert(dialog.dialog_id.clone(), self.dialogs.len());
        self.dialogs.push(dialog);
        Ok(())
    }

    fn check_annotations(&mut self, ann: &Annotations, unit: &str) -> Result<()> {
        for (dim, ratings) in ann {
            let bounds = match self.scale_bounds.get(dim) {
                Some(b) => *b,
                None => match self.default_scale {
                    Some(b) => {
                        self.scale_bounds.insert(dim.clone(), b);
                        b
                    }
                    None => return Err(Error::UndeclaredDimension(dim.clone())),
                },
            };
            for v in ratings.iter().filter_map(|r| r.value) {
                if !bounds.contains(v) {
                    return Err(Error::RatingOutOfBounds {
                        dimension: dim.clone(),
                        unit: unit.into(),
                        value: v,
                        min: bounds.min,
                        max: bounds.max,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dialogs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dialogs.is_empty()
    }

    pub fn finish(self) -> Corpus {
        Corpus {
            corpus_id: self.corpus_id,
            dialogs: self.dialogs,
            scale_bounds: self.scale_bounds,
            index: self.index,
        }
    }
}

/// Median of the ratings; an even count averages the two middle values.
/// `None` for an empty list.
pub fn consensus_label(ratings: &[f64]) -> Option<f64> {
    if ratings.is_empty() {
        return None;
    }
    let mut v = ratings.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}
