//! Readers for corpora, lexical resources, trait models and score files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use psylex_core::corpus::{
    Corpus, CorpusBuilder, Dialog, ExternalScore, Rating, ScaleBounds, Speaker, Turn,
};
use psylex_core::text::{CategoryDictionary, FeatureSpace, FeatureVector, LinearTraitModel, WeightedLexicon};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Deserialize)]
struct RawHeader {
    corpus_id: Option<String>,
    #[serde(default)]
    scale_bounds: BTreeMap<String, (f64, f64)>,
}

#[derive(Deserialize)]
struct RawTurn {
    turn_id: String,
    speaker: String,
    text: String,
    #[serde(default)]
    annotations: BTreeMap<String, Vec<Option<f64>>>,
    #[serde(default)]
    annotators: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct RawDialog {
    dialog_id: String,
    system_id: String,
    #[serde(default)]
    annotations: BTreeMap<String, Vec<Option<f64>>>,
    #[serde(default)]
    annotators: BTreeMap<String, Vec<String>>,
    turns: Vec<RawTurn>,
}

fn ratings(
    values: BTreeMap<String, Vec<Option<f64>>>,
    mut ids: BTreeMap<String, Vec<String>>,
) -> std::result::Result<BTreeMap<String, Vec<Rating>>, String> {
    if let Some(dim) = ids.keys().find(|d| !values.contains_key(*d)) {
        return Err(format!("annotator ids given for unrated dimension `{dim}`"));
    }
    values
        .into_iter()
        .map(|(dim, vals)| {
            let names = ids.remove(&dim);
            if let Some(n) = &names {
                if n.len() != vals.len() {
                    return Err(format!(
                        "dimension `{dim}`: {} annotator ids for {} ratings",
                        n.len(),
                        vals.len()
                    ));
                }
            }
            let rs = vals
                .into_iter()
                .enumerate()
                .map(|(i, value)| Rating {
                    annotator: names.as_ref().map(|n| n[i].clone()),
                    value,
                })
                .collect();
            Ok((dim, rs))
        })
        .collect()
}

fn dialog_from(raw: RawDialog) -> std::result::Result<Dialog, String> {
    let mut turns = Vec::with_capacity(raw.turns.len());
    for t in raw.turns {
        let speaker = Speaker::parse(&t.speaker).ok_or_else(|| {
            format!(
                "turn `{}`: speaker must be `agent` or `partner`, got `{}`",
                t.turn_id, t.speaker
            )
        })?;
        let mut turn = Turn::new(t.turn_id, speaker, t.text);
        turn.annotations = ratings(t.annotations, t.annotators)?;
        turns.push(turn);
    }
    let mut dialog = Dialog::new(raw.dialog_id, raw.system_id, turns);
    dialog.annotations = ratings(raw.annotations, raw.annotators)?;
    Ok(dialog)
}

/// Reads a JSONL corpus: one dialog object per line, blank lines ignored.
///
/// An optional first line without `dialog_id` is a header that may set
/// `corpus_id` and per-dimension `scale_bounds` (`{"dim": [min, max]}`).
/// Dimensions without declared bounds use a 1–5 scale.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    read_corpus(BufReader::new(open(path)?), path)
}

pub fn read_corpus(reader: impl BufRead, path: &Path) -> Result<Corpus> {
    let mut builder: Option<CorpusBuilder> = None;
    let mut corpus_id = stem(path);
    let mut bounds = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i as u64 + 1;
        let err = |msg: String| Error::parse(path, Some(lineno), msg);
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        if value.get("dialog_id").is_none() && value.get("turns").is_none() {
            if builder.is_some() {
                return Err(err("header line must come before the first dialog".into()));
            }
            let header: RawHeader = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
            if let Some(id) = header.corpus_id {
                corpus_id = id;
            }
            for (dim, (lo, hi)) in header.scale_bounds {
                bounds.insert(dim, ScaleBounds::new(lo, hi).map_err(|e| err(e.to_string()))?);
            }
            builder = Some(new_builder(&corpus_id, &bounds));
            continue;
        }
        let raw: RawDialog = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
        let dialog = dialog_from(raw).map_err(err)?;
        builder
            .get_or_insert_with(|| new_builder(&corpus_id, &bounds))
            .push(dialog)
            .map_err(|e| err(e.to_string()))?;
    }
    match builder {
        Some(b) if !b.is_empty() => Ok(b.finish()),
        _ => Err(Error::parse(path, None, "corpus contains no dialogs")),
    }
}

fn new_builder(id: &str, bounds: &BTreeMap<String, ScaleBounds>) -> CorpusBuilder {
    CorpusBuilder::new(id, bounds.clone()).default_scale(Some(ScaleBounds::LIKERT_5))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line());
    Error::parse(path, line, e.to_string())
}

/// Opens a headed CSV and checks its header exactly.
pub(crate) fn csv_reader<R: Read>(reader: R, path: &Path, header: &[&str]) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let found = rdr.headers().map_err(|e| csv_error(path, e))?;
    let found: Vec<&str> = found.iter().map(|h| h.trim_start_matches('\u{feff}')).collect();
    if found != header {
        return Err(Error::parse(
            path,
            Some(1),
            format!("expected header `{}`, found `{}`", header.join(","), found.join(",")),
        ));
    }
    Ok(rdr)
}

fn records<'a, R: Read + 'a>(
    rdr: &'a mut csv::Reader<R>,
    path: &Path,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + 'a {
    let path = path.to_path_buf();
    rdr.records().map(move |r| {
        let rec = r.map_err(|e| csv_error(&path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        Ok((line, rec))
    })
}

fn number(path: &Path, line: u64, field: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::parse(path, Some(line), format!("{field} `{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(path, Some(line), format!("{field} `{raw}` is not finite")));
    }
    Ok(v)
}

/// `term,category,weight`; duplicate (term, category) rows are summed.
pub fn load_weighted_lexicon(path: &Path) -> Result<WeightedLexicon> {
    read_weighted_lexicon(open(path)?, path)
}

pub fn read_weighted_lexicon(reader: impl Read, path: &Path) -> Result<WeightedLexicon> {
    let mut rdr = csv_reader(reader, path, &["term", "category", "weight"])?;
    let mut lex = WeightedLexicon::new(stem(path));
    for row in records(&mut rdr, path) {
        let (line, rec) = row?;
        let weight = number(path, line, "weight", &rec[2])?;
        lex.add(&rec[0], &rec[1], weight)
            .map_err(|e| Error::parse(path, Some(line), e.to_string()))?;
    }
    Ok(lex)
}

/// `pattern,category`; a trailing `*` makes the pattern a prefix.
pub fn load_category_dictionary(path: &Path) -> Result<CategoryDictionary> {
    read_category_dictionary(open(path)?, path)
}

pub fn read_category_dictionary(reader: impl Read, path: &Path) -> Result<CategoryDictionary> {
    let mut rdr = csv_reader(reader, path, &["pattern", "category"])?;
    let mut dict = CategoryDictionary::new();
    for row in records(&mut rdr, path) {
        let (line, rec) = row?;
        dict.add(&rec[0], &rec[1])
            .map_err(|e| Error::parse(path, Some(line), e.to_string()))?;
    }
    Ok(dict)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraitModelFile {
    trait_name: String,
    feature_space: String,
    intercept: f64,
    weights: BTreeMap<String, f64>,
}

pub fn load_trait_model(path: &Path) -> Result<LinearTraitModel> {
    let mut text = String::new();
    open(path)?
        .read_to_string(&mut text)
        .map_err(|e| Error::io(path, e))?;
    parse_trait_model(&text, path)
}

pub fn parse_trait_model(text: &str, path: &Path) -> Result<LinearTraitModel> {
    let raw: TraitModelFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(path, Some(e.line() as u64), e.to_string()))?;
    let space = FeatureSpace::parse(&raw.feature_space).ok_or_else(|| {
        Error::parse(
            path,
            None,
            format!("unknown feature space `{}`", raw.feature_space),
        )
    })?;
    LinearTraitModel::new(raw.trait_name, space, raw.intercept, raw.weights)
        .map_err(|e| Error::parse(path, None, e.to_string()))
}

/// Model JSON with full-precision weights, so a reloaded model predicts
/// exactly what the trained one did.
pub fn trait_model_json(model: &LinearTraitModel) -> String {
    let file = TraitModelFile {
        trait_name: model.trait_name.clone(),
        feature_space: model.feature_space.as_str().into(),
        intercept: model.intercept,
        weights: model.weights.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
    s.push('\n');
    s
}

/// `dialog_id,turn_id,metric_name,value`; an empty `turn_id` is dialog-level.
pub fn load_external_scores(path: &Path) -> Result<Vec<ExternalScore>> {
    read_external_scores(open(path)?, path)
}

pub fn read_external_scores(reader: impl Read, path: &Path) -> Result<Vec<ExternalScore>> {
    let mut rdr = csv_reader(reader, path, &["dialog_id", "turn_id", "metric_name", "value"])?;
    let mut out = Vec::new();
    for row in records(&mut rdr, path) {
        let (line, rec) = row?;
        if rec[0].is_empty() {
            return Err(Error::parse(path, Some(line), "empty dialog_id"));
        }
        out.push(ExternalScore {
            dialog_id: rec[0].to_string(),
            turn_id: (!rec[1].is_empty()).then(|| rec[1].to_string()),
            metric_name: rec[2].to_string(),
            value: number(path, line, "value", &rec[3])?,
        });
    }
    Ok(out)
}

/// Ridge training data: rows keyed by id, in label-file order.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingData {
    pub row_ids: Vec<String>,
    pub features: Vec<FeatureVector>,
    pub labels: Vec<f64>,
}

/// Features as long-format `row_id,feature,value`, labels as `row_id,value`.
/// Rows without any feature line get an empty vector.
pub fn load_training_data(features: &Path, labels: &Path, space: FeatureSpace) -> Result<TrainingData> {
    let mut rdr = csv_reader(open(labels)?, labels, &["row_id", "value"])?;
    let mut row_ids = Vec::new();
    let mut label_values = Vec::new();
    let mut index = BTreeMap::new();
    for row in records(&mut rdr, labels) {
        let (line, rec) = row?;
        if index.insert(rec[0].to_string(), row_ids.len()).is_some() {
            return Err(Error::parse(labels, Some(line), format!("duplicate row_id `{}`", &rec[0])));
        }
        row_ids.push(rec[0].to_string());
        label_values.push(number(labels, line, "value", &rec[1])?);
    }

    let mut values: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new(); row_ids.len()];
    let mut rdr = csv_reader(open(features)?, features, &["row_id", "feature", "value"])?;
    for row in records(&mut rdr, features) {
        let (line, rec) = row?;
        let Some(&i) = index.get(&rec[0]) else {
            return Err(Error::parse(
                features,
                Some(line),
                format!("row_id `{}` has no label", &rec[0]),
            ));
        };
        let v = number(features, line, "value", &rec[2])?;
        if values[i].insert(rec[1].to_string(), v).is_some() {
            return Err(Error::parse(
                features,
                Some(line),
                format!("duplicate feature `{}` for row `{}`", &rec[1], &rec[0]),
            ));
        }
    }
    Ok(TrainingData {
        row_ids,
        features: values
            .into_iter()
            .map(|v| FeatureVector::from_values(space, v))
            .collect(),
        labels: label_values,
    })
}
