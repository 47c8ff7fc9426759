use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::emotion::entropy_in;
use super::{
    apply_trait_model, emotion_matching, language_style_matching, DegenerateReason, EmotionLexicon,
    EmotionVector, EntropyBase, MetricTable, MetricValue, Scored,
};
use crate::corpus::{Corpus, Dialog, Level, Speaker, UnitKey};
use crate::text::{
    category_proportions, extract_ngrams, tokenize, topic_loadings, CategoryDictionary, FeatureSpace,
    FeatureVector, LinearTraitModel, TokenSequence, WeightedLexicon,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    EmotionalEntropy,
    EmotionMatching,
    LanguageStyleMatching,
    Agreeableness,
    Empathy,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::EmotionalEntropy,
        Metric::EmotionMatching,
        Metric::LanguageStyleMatching,
        Metric::Agreeableness,
        Metric::Empathy,
    ];

    /// State and matching metrics; traits are dialog-only.
    pub const TURN: [Metric; 3] = [
        Metric::EmotionalEntropy,
        Metric::EmotionMatching,
        Metric::LanguageStyleMatching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::EmotionalEntropy => "emotional_entropy",
            Metric::EmotionMatching => "emotion_matching",
            Metric::LanguageStyleMatching => "language_style_matching",
            Metric::Agreeableness => "agreeableness",
            Metric::Empathy => "empathy",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn turn_capable(self) -> bool {
        Self::TURN.contains(&self)
    }

    /// Name of the dialog-level row averaging this metric over turns.
    pub fn turn_mean_name(self) -> String {
        format!("{}_turn_mean", self.name())
    }
}

/// Loaded lexical resources and trait models.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub emotion: Option<EmotionLexicon>,
    pub function_words: Option<CategoryDictionary>,
    pub topics: Option<WeightedLexicon>,
    pub agreeableness: Option<LinearTraitModel>,
    pub empathy: Option<LinearTraitModel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    pub turn_metrics: Vec<Metric>,
    pub dialog_metrics: Vec<Metric>,
    /// Turn metrics that also get a dialog-level mean-over-turns row.
    pub turn_mean: Vec<Metric>,
    /// How many preceding turns are searched for partner text.
    pub window: usize,
    pub entropy_base: EntropyBase,
    pub ngram_max: usize,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            turn_metrics: Metric::TURN.to_vec(),
            dialog_metrics: Metric::ALL.to_vec(),
            turn_mean: Vec::new(),
            window: 1,
            entropy_base: EntropyBase::Nats,
            ngram_max: 3,
        }
    }
}

impl ScoreConfig {
    /// Checks settings and that every configured metric has its resources.
    pub fn validate(&self, resources: &Resources) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Config("matching window must be at least 1".into()));
        }
        if self.ngram_max == 0 {
            return Err(Error::Config("ngram_max must be at least 1".into()));
        }
        for m in &self.turn_metrics {
            if !m.turn_capable() {
                return Err(Error::Config(format!("`{}` is not a turn-level metric", m.name())));
            }
        }
        for m in &self.turn_mean {
            if !self.turn_metrics.contains(m) {
                return Err(Error::Config(format!(
                    "turn-mean aggregation of `{}` requires it as a turn metric",
                    m.name()
                )));
            }
        }
        for m in self.turn_metrics.iter().chain(&self.dialog_metrics) {
            check_resources(*m, resources)?;
        }
        Ok(())
    }
}

fn missing_resource(metric: Metric, what: &str) -> Error {
    Error::Config(format!("metric `{}` needs a {what}", metric.name()))
}

fn check_resources(metric: Metric, r: &Resources) -> Result<()> {
    match metric {
        Metric::EmotionalEntropy | Metric::EmotionMatching => {
            r.emotion.as_ref().ok_or_else(|| missing_resource(metric, "emotion lexicon"))?;
        }
        Metric::LanguageStyleMatching => {
            let d = r
                .function_words
                .as_ref()
                .ok_or_else(|| missing_resource(metric, "function-word dictionary"))?;
            if d.categories().is_empty() {
                return Err(Error::Config("function-word dictionary has no categories".into()));
            }
        }
        Metric::Agreeableness | Metric::Empathy => {
            let model = trait_model(metric, r)?;
            if model.feature_space != FeatureSpace::Ngram && r.topics.is_none() {
                return Err(missing_resource(metric, "topic model"));
            }
        }
    }
    Ok(())
}

fn trait_model(metric: Metric, r: &Resources) -> Result<&LinearTraitModel> {
    let model = match metric {
        Metric::Agreeableness => r.agreeableness.as_ref(),
        _ => r.empathy.as_ref(),
    };
    model.ok_or_else(|| missing_resource(metric, "trait model"))
}

/// Scores for both levels, rows in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCorpus {
    pub turn: MetricTable,
    pub dialog: MetricTable,
}

impl ScoredCorpus {
    /// Assembles per-dialog results that are already in corpus order.
    pub fn from_parts<I>(parts: I) -> ScoredCorpus
    where
        I: IntoIterator<Item = (Vec<MetricValue>, Vec<MetricValue>)>,
    {
        let mut turn = MetricTable::new(Level::Turn);
        let mut dialog = MetricTable::new(Level::Dialog);
        for (t, d) in parts {
            turn.rows.extend(t);
            dialog.rows.extend(d);
        }
        ScoredCorpus { turn, dialog }
    }
}

/// Scores every dialog after checking the configuration once.
pub fn score_corpus(corpus: &Corpus, resources: &Resources, config: &ScoreConfig) -> Result<ScoredCorpus> {
    config.validate(resources)?;
    let parts = corpus
        .dialogs()
        .iter()
        .map(|d| score_dialog(d, resources, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoredCorpus::from_parts(parts))
}

fn concat<'a>(parts: impl Iterator<Item = &'a TokenSequence>) -> TokenSequence {
    let mut out = TokenSequence::default();
    for p in parts {
        out.extend(p);
    }
    out
}

struct Side<'a> {
    tokens: &'a TokenSequence,
    emotion: Option<EmotionVector>,
}

/// Turn and dialog rows for one dialog.
///
/// Turn rows cover agent turns only. Matching metrics compare an agent turn
/// with the partner turns among the `window` turns before it; dialog-level
/// metrics use all agent text joined together (and all partner text for
/// matching).
pub fn score_dialog(
    dialog: &Dialog,
    resources: &Resources,
    config: &ScoreConfig,
) -> Result<(Vec<MetricValue>, Vec<MetricValue>)> {
    let tokens: Vec<TokenSequence> = dialog.turns.iter().map(|t| tokenize(&t.text)).collect();
    let emotion = |toks: &TokenSequence| resources.emotion.as_ref().map(|e| e.vector(toks));
    let needs_emotion = config
        .turn_metrics
        .iter()
        .chain(&config.dialog_metrics)
        .any(|m| matches!(m, Metric::EmotionalEntropy | Metric::EmotionMatching));

    let mut turn_rows = Vec::new();
    for (i, turn) in dialog.turns.iter().enumerate() {
        if turn.speaker != Speaker::Agent {
            continue;
        }
        let key = UnitKey::turn(dialog.dialog_id.clone(), turn.turn_id.clone());
        let start = i.saturating_sub(config.window);
        let partner_idx: Vec<usize> = (start..i)
            .filter(|&j| dialog.turns[j].speaker == Speaker::Partner)
            .collect();
        let partner_tokens = concat(partner_idx.iter().map(|&j| &tokens[j]));
        let agent = Side {
            tokens: &tokens[i],
            emotion: if needs_emotion { emotion(&tokens[i]) } else { None },
        };
        let partner = (!partner_idx.is_empty()).then(|| Side {
            tokens: &partner_tokens,
            emotion: if needs_emotion { emotion(&partner_tokens) } else { None },
        });
        for &metric in &config.turn_metrics {
            let value = state_or_matching(metric, &agent, partner.as_ref(), resources, config)?;
            turn_rows.push(MetricValue::new(key.clone(), metric.name(), value));
        }
    }

    let agent_tokens = concat(
        dialog
            .turns
            .iter()
            .zip(&tokens)
            .filter(|(t, _)| t.speaker == Speaker::Agent)
            .map(|(_, toks)| toks),
    );
    let partner_turns: Vec<&TokenSequence> = dialog
        .turns
        .iter()
        .zip(&tokens)
        .filter(|(t, _)| t.speaker == Speaker::Partner)
        .map(|(_, toks)| toks)
        .collect();
    let partner_tokens = concat(partner_turns.iter().copied());
    let agent = Side {
        tokens: &agent_tokens,
        emotion: if needs_emotion { emotion(&agent_tokens) } else { None },
    };
    let partner = (!partner_turns.is_empty()).then(|| Side {
        tokens: &partner_tokens,
        emotion: if needs_emotion { emotion(&partner_tokens) } else { None },
    });

    let dkey = UnitKey::dialog(dialog.dialog_id.clone());
    let mut dialog_rows = Vec::new();
    for &metric in &config.dialog_metrics {
        let value = match metric {
            Metric::Agreeableness | Metric::Empathy => {
                if agent_tokens.is_empty() {
                    Scored::Missing(DegenerateReason::EmptyText)
                } else {
                    let model = trait_model(metric, resources)?;
                    let agent_units: Vec<TokenSequence> = dialog
                        .turns
                        .iter()
                        .zip(&tokens)
                        .filter(|(t, toks)| t.speaker == Speaker::Agent && !toks.is_empty())
                        .map(|(_, toks)| toks.clone())
                        .collect();
                    let features = trait_features(model.feature_space, &agent_units, &agent_tokens, resources, config)?;
                    Scored::Value(apply_trait_model(&features, model)?)
                }
            }
            _ => state_or_matching(metric, &agent, partner.as_ref(), resources, config)?,
        };
        dialog_rows.push(MetricValue::new(dkey.clone(), metric.name(), value));
    }

    for &metric in &config.turn_mean {
        let rows: Vec<&MetricValue> = turn_rows.iter().filter(|r| r.metric == metric.name()).collect();
        let values: Vec<f64> = rows.iter().filter_map(|r| r.value.value()).collect();
        let value = if values.is_empty() {
            Scored::Missing(
                rows.first()
                    .and_then(|r| r.value.reason())
                    .unwrap_or(DegenerateReason::EmptyText),
            )
        } else {
            Scored::Value(values.iter().sum::<f64>() / values.len() as f64)
        };
        dialog_rows.push(MetricValue::new(dkey.clone(), metric.turn_mean_name(), value));
    }

    Ok((turn_rows, dialog_rows))
}

fn state_or_matching(
    metric: Metric,
    agent: &Side<'_>,
    partner: Option<&Side<'_>>,
    resources: &Resources,
    config: &ScoreConfig,
) -> Result<Scored> {
    use DegenerateReason::*;
    if agent.tokens.is_empty() {
        return Ok(Scored::Missing(EmptyText));
    }
    if metric == Metric::EmotionalEntropy {
        let v = agent.emotion.ok_or_else(|| missing_resource(metric, "emotion lexicon"))?;
        return Ok(match entropy_in(&v, config.entropy_base) {
            Some(h) => Scored::Value(h),
            None => Scored::Missing(ZeroEmotionVector),
        });
    }
    let Some(partner) = partner else {
        return Ok(Scored::Missing(NoPartnerTurn));
    };
    if partner.tokens.is_empty() {
        return Ok(Scored::Missing(EmptyText));
    }
    match metric {
        Metric::EmotionMatching => {
            let (Some(a), Some(p)) = (agent.emotion, partner.emotion) else {
                return Err(missing_resource(metric, "emotion lexicon"));
            };
            Ok(emotion_matching(&a, &p))
        }
        Metric::LanguageStyleMatching => {
            let dict = resources
                .function_words
                .as_ref()
                .ok_or_else(|| missing_resource(metric, "function-word dictionary"))?;
            language_style_matching(
                &category_proportions(agent.tokens, dict),
                &category_proportions(partner.tokens, dict),
            )
        }
        _ => Err(Error::Config(format!("`{}` is not a turn-level metric", metric.name()))),
    }
}

fn trait_features(
    space: FeatureSpace,
    units: &[TokenSequence],
    joined: &TokenSequence,
    resources: &Resources,
    config: &ScoreConfig,
) -> Result<FeatureVector> {
    let topics = || {
        resources
            .topics
            .as_ref()
            .map(|t| topic_loadings(joined, t).loadings)
            .ok_or_else(|| Error::Config("trait model needs a topic model".into()))
    };
    match space {
        FeatureSpace::Ngram => extract_ngrams(units, config.ngram_max),
        FeatureSpace::Topic => topics(),
        FeatureSpace::Combined => FeatureVector::combine(&extract_ngrams(units, config.ngram_max)?, &topics()?),
    }
}
