//! Deterministic CSV and JSON artifacts, and parsers that read them back.
//!
//! Every float goes through [`format_float`], rows follow the order of the
//! in-memory artifact and JSON objects have fixed field order.

use std::path::Path;

use psylex_core::corpus::{AgreementReport, Level, UnitKey};
use psylex_core::metrics::{DegenerateReason, MetricTable, MetricValue, Scored};
use psylex_core::report::{ComparisonRow, HeatmapData, SystemProfile};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{format_float, format_opt, round6};
use crate::io::csv_reader;

pub const METRIC_TABLE_HEADER: [&str; 6] =
    ["level", "dialog_id", "turn_id", "metric_name", "value", "degenerate_reason"];

pub const REGRESSION_HEADER: [&str; 12] = [
    "level",
    "judgement",
    "traditional",
    "psych_model",
    "n",
    "r2_T",
    "r2_P",
    "r2_PT",
    "p_raw",
    "p_corrected",
    "stars",
    "note",
];

pub const PROFILE_HEADER: [&str; 4] = ["system_id", "metric", "raw_mean", "normalized"];

/// Writes `contents` to `path`, naming the path on failure.
pub fn write_artifact(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

fn write_row<I, S>(w: &mut csv::Writer<Vec<u8>>, fields: I)
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields).expect("in-memory writer");
}

pub fn metric_table_csv(table: &MetricTable) -> String {
    let mut w = csv_writer();
    write_row(&mut w, METRIC_TABLE_HEADER);
    for row in &table.rows {
        let (value, reason) = match row.value {
            Scored::Value(v) => (format_float(v), ""),
            Scored::Missing(r) => (String::new(), r.as_str()),
        };
        write_row(
            &mut w,
            [
                table.level.as_str(),
                &row.unit.dialog_id,
                row.unit.turn_id.as_deref().unwrap_or(""),
                &row.metric,
                &value,
                reason,
            ],
        );
    }
    finish(w)
}

pub fn parse_metric_table(text: &str, path: &Path, level: Level) -> Result<MetricTable> {
    let mut rdr = csv_reader(text.as_bytes(), path, &METRIC_TABLE_HEADER)?;
    let mut table = MetricTable::new(level);
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(path, e.position().map(|p| p.line()), e.to_string()))?;
        let line = rec.position().map(|p| p.line());
        let bad = |msg: String| Error::parse(path, line, msg);
        if Level::parse(&rec[0]) != Some(level) {
            return Err(bad(format!("expected level `{}`, found `{}`", level.as_str(), &rec[0])));
        }
        let unit = match level {
            Level::Turn => UnitKey::turn(&rec[1], &rec[2]),
            Level::Dialog => UnitKey::dialog(&rec[1]),
        };
        let value = match (&rec[4], &rec[5]) {
            (v, "") if !v.is_empty() => Scored::Value(
                v.parse()
                    .map_err(|_| bad(format!("value `{v}` is not a number")))?,
            ),
            ("", r) => Scored::Missing(
                DegenerateReason::parse(r).ok_or_else(|| bad(format!("unknown reason `{r}`")))?,
            ),
            _ => return Err(bad("exactly one of value and degenerate_reason must be set".into())),
        };
        table.push(MetricValue::new(unit, &rec[3], value));
    }
    Ok(table)
}

/// Heatmap file layout; cells without a correlation are `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapFile {
    pub order: Vec<String>,
    pub matrix: Vec<Vec<Option<f64>>>,
    pub n: Vec<Vec<usize>>,
}

impl From<&HeatmapData> for HeatmapFile {
    fn from(h: &HeatmapData) -> Self {
        HeatmapFile {
            order: h.order.clone(),
            matrix: h
                .matrix
                .iter()
                .map(|row| row.iter().map(|v| v.map(round6)).collect())
                .collect(),
            n: h.n.clone(),
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

pub fn heatmap_json(h: &HeatmapData) -> String {
    pretty(&HeatmapFile::from(h))
}

pub fn parse_heatmap(text: &str, path: &Path) -> Result<HeatmapFile> {
    let h: HeatmapFile = serde_json::from_str(text)
        .map_err(|e| Error::parse(path, Some(e.line() as u64), e.to_string()))?;
    let k = h.order.len();
    let ragged = h.matrix.iter().any(|r| r.len() != k) || h.n.iter().any(|r| r.len() != k);
    if h.matrix.len() != k || h.n.len() != k || ragged {
        return Err(Error::parse(path, None, "matrix shape does not match order"));
    }
    Ok(h)
}

pub fn regression_csv(rows: &[ComparisonRow]) -> String {
    let mut w = csv_writer();
    write_row(&mut w, REGRESSION_HEADER);
    for r in rows {
        write_row(
            &mut w,
            [
                r.level.as_str().to_string(),
                r.judgement.clone(),
                r.traditional.clone(),
                r.psych_model.clone(),
                r.n.to_string(),
                format_opt(r.r2_t),
                format_opt(r.r2_p),
                format_opt(r.r2_pt),
                format_opt(r.p_raw),
                format_opt(r.p_corrected),
                r.stars.as_str().to_string(),
                r.note.clone().unwrap_or_default(),
            ],
        );
    }
    finish(w)
}

/// One parsed row of a regression table.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RegressionRecord {
    pub level: String,
    pub judgement: String,
    pub traditional: String,
    pub psych_model: String,
    pub n: usize,
    #[serde(rename = "r2_T")]
    pub r2_t: Option<f64>,
    #[serde(rename = "r2_P")]
    pub r2_p: Option<f64>,
    #[serde(rename = "r2_PT")]
    pub r2_pt: Option<f64>,
    pub p_raw: Option<f64>,
    pub p_corrected: Option<f64>,
    pub stars: String,
    pub note: String,
}

pub fn parse_regression(text: &str, path: &Path) -> Result<Vec<RegressionRecord>> {
    let mut rdr = csv_reader(text.as_bytes(), path, &REGRESSION_HEADER)?;
    rdr.deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::parse(path, e.position().map(|p| p.line()), e.to_string())))
        .collect()
}

pub fn profiles_csv(profiles: &[SystemProfile]) -> String {
    let mut w = csv_writer();
    write_row(&mut w, PROFILE_HEADER);
    for p in profiles {
        for (metric, entry) in &p.metrics {
            write_row(
                &mut w,
                [
                    p.system_id.as_str(),
                    metric,
                    &format_opt(entry.raw_mean),
                    &format_opt(entry.normalized),
                ],
            );
        }
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ProfileRecord {
    pub system_id: String,
    pub metric: String,
    pub raw_mean: Option<f64>,
    pub normalized: Option<f64>,
}

pub fn parse_profiles(text: &str, path: &Path) -> Result<Vec<ProfileRecord>> {
    let mut rdr = csv_reader(text.as_bytes(), path, &PROFILE_HEADER)?;
    rdr.deserialize()
        .map(|r| r.map_err(|e: csv::Error| Error::parse(path, e.position().map(|p| p.line()), e.to_string())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelAgreement {
    pub level: String,
    pub alphas: std::collections::BTreeMap<String, Option<f64>>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementFile {
    pub difference: String,
    pub levels: Vec<LevelAgreement>,
}

impl From<&AgreementReport> for LevelAgreement {
    fn from(r: &AgreementReport) -> Self {
        LevelAgreement {
            level: r.level.as_str().into(),
            alphas: r.alphas.iter().map(|(k, v)| (k.clone(), v.map(round6))).collect(),
            mean: r.mean.map(round6),
        }
    }
}

pub fn agreement_json(file: &AgreementFile) -> String {
    pretty(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub trait_name: String,
    pub feature_space: String,
    pub lambda: f64,
    pub folds: usize,
    pub n: usize,
    pub r: Option<f64>,
}

pub fn cv_report_json(report: &CvReport) -> String {
    pretty(&CvReport {
        lambda: round6(report.lambda),
        r: report.r.map(round6),
        ..report.clone()
    })
}
