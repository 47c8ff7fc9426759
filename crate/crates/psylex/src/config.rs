//! Run configuration: a JSON file plus `--set key=value` overrides.

use std::path::{Path, PathBuf};

use psylex_core::corpus::Difference;
use psylex_core::metrics::{EntropyBase, Metric, ScoreConfig};
use psylex_core::stats::Correction;
use psylex_core::text::FeatureSpace;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Keys holding file paths; relative values in the config file are resolved
/// against the file's directory.
const PATH_KEYS: [&[&str]; 7] = [
    &["resources", "emotion_lexicon"],
    &["resources", "function_words"],
    &["resources", "topics"],
    &["resources", "agreeableness_model"],
    &["resources", "empathy_model"],
    &["evaluate", "scores"],
    &["output_dir"],
];

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub emotion_lexicon: Option<PathBuf>,
    pub function_words: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub agreeableness_model: Option<PathBuf>,
    pub empathy_model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricSettings {
    pub turn: Vec<String>,
    pub dialog: Vec<String>,
    pub turn_mean: Vec<String>,
    pub window: usize,
    pub entropy_base: String,
    pub ngram_max: usize,
}

impl Default for MetricSettings {
    fn default() -> Self {
        let d = ScoreConfig::default();
        MetricSettings {
            turn: d.turn_metrics.iter().map(|m| m.name().into()).collect(),
            dialog: d.dialog_metrics.iter().map(|m| m.name().into()).collect(),
            turn_mean: Vec::new(),
            window: d.window,
            entropy_base: d.entropy_base.as_str().into(),
            ngram_max: d.ngram_max,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JudgementSelection {
    pub turn: Option<Vec<String>>,
    pub dialog: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSettings {
    pub scores: Option<PathBuf>,
    /// Judgement dimensions per level; all annotated dimensions when unset.
    pub judgements: JudgementSelection,
    /// External metrics to use as T; all of them when unset.
    pub traditional: Option<Vec<String>>,
    /// Psychological metrics to use as P; all scored ones when unset.
    pub psychological: Option<Vec<String>>,
    pub all_psych: bool,
    pub correction: String,
    pub comparisons: Option<usize>,
}

impl Default for EvaluateSettings {
    fn default() -> Self {
        EvaluateSettings {
            scores: None,
            judgements: JudgementSelection::default(),
            traditional: None,
            psychological: None,
            all_psych: true,
            correction: Correction::default().name().into(),
            comparisons: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgreementSettings {
    pub difference: String,
}

impl Default for AgreementSettings {
    fn default() -> Self {
        AgreementSettings {
            difference: Difference::default().as_str().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub lambda: f64,
    pub folds: usize,
    pub feature_space: String,
    pub trait_name: String,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            lambda: 1.0,
            folds: 10,
            feature_space: FeatureSpace::Ngram.as_str().into(),
            trait_name: "trait".into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub resources: ResourcePaths,
    pub metrics: MetricSettings,
    pub agreement: AgreementSettings,
    pub evaluate: EvaluateSettings,
    pub train: TrainSettings,
    pub output_dir: Option<PathBuf>,
}

fn metric_list(names: &[String]) -> Result<Vec<Metric>> {
    names
        .iter()
        .map(|n| Metric::parse(n).ok_or_else(|| Error::Config(format!("unknown metric `{n}`"))))
        .collect()
}

impl RunConfig {
    /// Reads the config file (if any), resolves its relative paths, then
    /// applies overrides in order. Override paths stay relative to the
    /// working directory.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
        let mut root = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                let mut v: Value = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                let base = p.parent().unwrap_or(Path::new(""));
                resolve_paths(&mut v, base);
                v
            }
            None => Value::Object(Map::new()),
        };
        for o in overrides {
            apply_override(&mut root, o)?;
        }
        serde_json::from_value(root).map_err(|e| Error::Config(format!("invalid configuration: {e}")))
    }

    pub fn score_config(&self) -> Result<ScoreConfig> {
        let m = &self.metrics;
        Ok(ScoreConfig {
            turn_metrics: metric_list(&m.turn)?,
            dialog_metrics: metric_list(&m.dialog)?,
            turn_mean: metric_list(&m.turn_mean)?,
            window: m.window,
            entropy_base: EntropyBase::parse(&m.entropy_base)
                .ok_or_else(|| Error::Config(format!("unknown entropy base `{}`", m.entropy_base)))?,
            ngram_max: m.ngram_max,
        })
    }

    pub fn correction(&self) -> Result<Correction> {
        match self.evaluate.correction.as_str() {
            "bonferroni" => Ok(Correction::Bonferroni),
            "benjamini_hochberg" | "bh" => Ok(Correction::BenjaminiHochberg),
            other => Err(Error::Config(format!("unknown correction `{other}`"))),
        }
    }

    pub fn difference(&self) -> Result<Difference> {
        Difference::parse(&self.agreement.difference).ok_or_else(|| {
            Error::Config(format!("unknown difference function `{}`", self.agreement.difference))
        })
    }

    pub fn feature_space(&self) -> Result<FeatureSpace> {
        FeatureSpace::parse(&self.train.feature_space).ok_or_else(|| {
            Error::Config(format!("unknown feature space `{}`", self.train.feature_space))
        })
    }
}

fn resolve_paths(root: &mut Value, base: &Path) {
    for key in PATH_KEYS {
        let pointer: String = key.iter().map(|k| format!("/{k}")).collect();
        if let Some(Value::String(s)) = root.pointer_mut(&pointer) {
            let p = Path::new(s.as_str());
            if p.is_relative() {
                *s = base.join(p).to_string_lossy().into_owned();
            }
        }
    }
}

/// Sets a dotted key. The value is parsed as JSON when possible and taken
/// as a plain string otherwise.
fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{spec}` is not key=value")))?;
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("override `{spec}` has an empty key segment")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()));
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}` descends into a non-object")))?;
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::Config(format!("override `{key}` descends into a non-object")))?
        .insert(parts[parts.len() - 1].into(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::load(None, &[]).unwrap();
        assert_eq!(c.score_config().unwrap(), ScoreConfig::default());
        assert_eq!(c.correction().unwrap(), Correction::Bonferroni);
        assert_eq!(c.difference().unwrap(), Difference::Linear);
        assert_eq!(c.train.folds, 10);
    }

    #[test]
    fn overrides() {
        let sets = [
            "metrics.window=2".to_string(),
            "resources.emotion_lexicon=lex/emo.csv".into(),
            "evaluate.traditional=[\"bleu\"]".into(),
            "metrics.entropy_base=bits".into(),
        ];
        let c = RunConfig::load(None, &sets).unwrap();
        assert_eq!(c.metrics.window, 2);
        assert_eq!(c.resources.emotion_lexicon, Some(PathBuf::from("lex/emo.csv")));
        assert_eq!(c.evaluate.traditional, Some(vec!["bleu".into()]));
        assert_eq!(c.score_config().unwrap().entropy_base, EntropyBase::Bits);
    }

    #[test]
    fn bad_overrides_are_config_errors() {
        for s in ["window", "metrics.window=-1", "nope=1", "metrics..window=1", "output_dir.x=1"] {
            let e = RunConfig::load(None, &[s.to_string()]).unwrap_err();
            assert_eq!(e.exit_code(), crate::error::EXIT_CONFIG, "{s}");
        }
        let c = RunConfig::load(None, &["metrics.turn=[\"empathy_x\"]".to_string()]).unwrap();
        assert!(c.score_config().is_err());
    }

    #[test]
    fn paths_resolve_against_config_dir() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        let path = dir.join("run.json");
        std::fs::write(
            &path,
            r#"{"resources":{"emotion_lexicon":"emo.csv","topics":"/abs/topics.csv"},"output_dir":"out"}"#,
        )
        .unwrap();
        let c = RunConfig::load(Some(&path), &[]).unwrap();
        assert_eq!(c.resources.emotion_lexicon, Some(dir.join("emo.csv")));
        assert_eq!(c.resources.topics, Some(PathBuf::from("/abs/topics.csv")));
        assert_eq!(c.output_dir, Some(dir.join("out")));
    }
}
