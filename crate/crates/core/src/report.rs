//! Evaluation products: clustered correlation heatmap, T / P / P+T regression
//! comparison tables and per-system normalized metric profiles.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{Corpus, Level, UnitKey};
use crate::metrics::MetricTable;
use crate::stats::{
    cluster_order, minmax_normalize, ols_fit, paired_t_test, pearson, Correction, Predictor,
    RegressionResult, Stars,
};
use crate::{Error, Result};

/// Minimum paired observations behind a heatmap correlation.
pub const MIN_PAIRS: usize = 3;

/// Label of the model holding every psychological metric at once.
pub const ALL_PSYCH: &str = "all_psych";

#[derive(Debug, Clone, PartialEq)]
pub struct ExcludedMetric {
    pub metric: String,
    pub reason: String,
}

/// Correlation matrix in dendrogram leaf order.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapData {
    pub order: Vec<String>,
    /// `None` where a pair had too few observations or no variance.
    pub matrix: Vec<Vec<Option<f64>>>,
    pub n: Vec<Vec<usize>>,
    pub excluded: Vec<ExcludedMetric>,
}

/// Pairwise Pearson correlations between all metrics in a table, with rows
/// and columns ordered by average-linkage clustering on `1 − |r|`.
pub fn build_heatmap(table: &MetricTable) -> Result<HeatmapData> {
    let mut names = Vec::new();
    let mut columns = Vec::new();
    let mut excluded = Vec::new();
    for metric in table.metric_names() {
        let col = table.column(&metric);
        let values: Vec<f64> = col.values().copied().collect();
        let reason = if values.len() < MIN_PAIRS {
            Some(format!("{} observations, need {MIN_PAIRS}", values.len()))
        } else if values.iter().all(|v| *v == values[0]) {
            Some("constant values".to_string())
        } else {
            None
        };
        match reason {
            Some(reason) => excluded.push(ExcludedMetric { metric, reason }),
            None => {
                names.push(metric);
                columns.push(col);
            }
        }
    }
    if names.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: names.len(),
        });
    }

    let k = names.len();
    let mut matrix = vec![vec![None; k]; k];
    let mut counts = vec![vec![0usize; k]; k];
    for i in 0..k {
        matrix[i][i] = Some(1.0);
        counts[i][i] = columns[i].len();
        for j in i + 1..k {
            let (xs, ys): (Vec<f64>, Vec<f64>) = columns[i]
                .iter()
                .filter_map(|(unit, x)| columns[j].get(unit).map(|y| (*x, *y)))
                .unzip();
            let r = if xs.len() >= MIN_PAIRS {
                pearson(&xs, &ys)?
            } else {
                None
            };
            matrix[i][j] = r;
            matrix[j][i] = r;
            counts[i][j] = xs.len();
            counts[j][i] = xs.len();
        }
    }

    let order = cluster_order(&matrix)?;
    Ok(HeatmapData {
        order: order.iter().map(|&i| names[i].clone()).collect(),
        matrix: order
            .iter()
            .map(|&i| order.iter().map(|&j| matrix[i][j]).collect())
            .collect(),
        n: order
            .iter()
            .map(|&i| order.iter().map(|&j| counts[i][j]).collect())
            .collect(),
        excluded,
    })
}

/// Which regressions to run for one judgement dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTableSpec {
    pub level: Level,
    pub judgement: String,
    pub traditional: Vec<String>,
    pub psychological: Vec<String>,
    /// Add a model with every psychological metric together.
    pub all_psych: bool,
}

/// One (traditional metric, psychological model) cell of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub level: Level,
    pub judgement: String,
    pub traditional: String,
    pub psych_model: String,
    pub n: usize,
    /// Adjusted R² of the T, P and P+T models.
    pub r2_t: Option<f64>,
    pub r2_p: Option<f64>,
    pub r2_pt: Option<f64>,
    /// Unadjusted R² of the same models.
    pub raw_r2: Option<[f64; 3]>,
    /// Paired t-test on absolute residuals, T vs P+T.
    pub p_raw: Option<f64>,
    pub p_corrected: Option<f64>,
    pub stars: Stars,
    pub note: Option<String>,
}

struct CellFits {
    t: RegressionResult,
    p: RegressionResult,
    pt: RegressionResult,
}

fn fit_cell(
    y: &[f64],
    traditional: &Predictor,
    psych: &[Predictor],
) -> Result<CellFits> {
    let t = ols_fit(core::slice::from_ref(traditional), y, true)?;
    let p = ols_fit(psych, y, true)?;
    let mut both = psych.to_vec();
    both.push(traditional.clone());
    let pt = ols_fit(&both, y, true)?;
    Ok(CellFits { t, p, pt })
}

/// Fits T, P and P+T for every cell and compares T with P+T.
///
/// Units missing the judgement or any metric of the cell are dropped for
/// that cell only. `comparisons` overrides the correction family size, which
/// defaults to the number of rows in the table.
pub fn build_regression_table(
    table: &MetricTable,
    judgements: &BTreeMap<UnitKey, f64>,
    spec: &RegressionTableSpec,
    correction: Correction,
    comparisons: Option<usize>,
) -> Result<Vec<ComparisonRow>> {
    for name in spec.traditional.iter().chain(&spec.psychological) {
        if !table.has_metric(name) {
            return Err(Error::UnknownMetric(name.clone()));
        }
    }
    let mut models: Vec<(String, Vec<String>)> = spec
        .psychological
        .iter()
        .map(|m| (m.clone(), vec![m.clone()]))
        .collect();
    if spec.all_psych && !spec.psychological.is_empty() {
        models.push((ALL_PSYCH.to_string(), spec.psychological.clone()));
    }
    let columns: BTreeMap<&str, BTreeMap<UnitKey, f64>> = spec
        .traditional
        .iter()
        .chain(&spec.psychological)
        .map(|m| (m.as_str(), table.column(m)))
        .collect();

    let mut rows = Vec::new();
    for trad in &spec.traditional {
        for (label, members) in &models {
            let mut y = Vec::new();
            let mut t_vals = Vec::new();
            let mut p_vals: Vec<Vec<f64>> = vec![Vec::new(); members.len()];
            'units: for (unit, &target) in judgements {
                let Some(&tv) = columns[trad.as_str()].get(unit) else {
                    continue;
                };
                let mut row = Vec::with_capacity(members.len());
                for m in members {
                    match columns[m.as_str()].get(unit) {
                        Some(&v) => row.push(v),
                        None => continue 'units,
                    }
                }
                y.push(target);
                t_vals.push(tv);
                for (col, v) in p_vals.iter_mut().zip(row) {
                    col.push(v);
                }
            }
            let n = y.len();
            let traditional = Predictor::new(trad.clone(), t_vals);
            let psych: Vec<Predictor> = members
                .iter()
                .zip(p_vals)
                .map(|(m, v)| Predictor::new(m.clone(), v))
                .collect();

            let mut row = ComparisonRow {
                level: spec.level,
                judgement: spec.judgement.clone(),
                traditional: trad.clone(),
                psych_model: label.clone(),
                n,
                r2_t: None,
                r2_p: None,
                r2_pt: None,
                raw_r2: None,
                p_raw: None,
                p_corrected: None,
                stars: Stars::None,
                note: None,
            };
            if n <= psych.len() + 2 {
                row.note = Some(format!("insufficient n ({n}) after listwise deletion"));
                rows.push(row);
                continue;
            }
            match fit_cell(&y, &traditional, &psych) {
                Ok(fits) => {
                    row.r2_t = Some(fits.t.adjusted_r2);
                    row.r2_p = Some(fits.p.adjusted_r2);
                    row.r2_pt = Some(fits.pt.adjusted_r2);
                    row.raw_r2 = Some([fits.t.r2, fits.p.r2, fits.pt.r2]);
                    let abs_t: Vec<f64> = fits.t.residuals.iter().map(|r| r.abs()).collect();
                    let abs_pt: Vec<f64> = fits.pt.residuals.iter().map(|r| r.abs()).collect();
                    match paired_t_test(&abs_t, &abs_pt)? {
                        Some(test) => row.p_raw = Some(test.p),
                        None => row.note = Some("residual differences are constant".into()),
                    }
                }
                Err(e) => row.note = Some(e.to_string()),
            }
            rows.push(row);
        }
    }

    let m = comparisons.unwrap_or(rows.len()).max(1);
    for row in &mut rows {
        if let Some(p) = row.p_raw {
            let corrected = correction.apply(p, m)?;
            row.p_corrected = Some(corrected);
            row.stars = Stars::from_p(corrected);
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub raw_mean: Option<f64>,
    pub normalized: Option<f64>,
}

/// Mean metric values of one dialog system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemProfile {
    pub system_id: String,
    pub metrics: BTreeMap<String, ProfileEntry>,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Per-system means without normalization.
///
/// Turn rows are first averaged within their dialog, then dialogs are
/// averaged within the system, so every dialog counts once. Metrics are keyed
/// `<level>.<metric>` so that a name scored at both levels stays two entries.
pub fn system_raw_means(tables: &[&MetricTable], corpus: &Corpus) -> Vec<SystemProfile> {
    let systems = corpus.systems();
    // metric -> system -> per-dialog values
    let mut per_dialog: BTreeMap<String, BTreeMap<&str, Vec<f64>>> = BTreeMap::new();
    for table in tables {
        for metric in table.metric_names() {
            let col = table.column(&metric);
            let key = format!("{}.{metric}", table.level.as_str());
            let slot = per_dialog.entry(key).or_default();
            for d in corpus.dialogs() {
                let values: Vec<f64> = col
                    .range(UnitKey::dialog(d.dialog_id.clone())..)
                    .take_while(|(k, _)| k.dialog_id == d.dialog_id)
                    .map(|(_, v)| *v)
                    .collect();
                if let Some(m) = mean(&values) {
                    slot.entry(d.system_id.as_str()).or_default().push(m);
                }
            }
        }
    }
    systems
        .iter()
        .map(|&s| SystemProfile {
            system_id: s.to_string(),
            metrics: per_dialog
                .iter()
                .map(|(metric, by_system)| {
                    let raw = by_system.get(s).and_then(|v| mean(v));
                    (
                        metric.clone(),
                        ProfileEntry {
                            raw_mean: raw,
                            normalized: None,
                        },
                    )
                })
                .collect(),
        })
        .collect()
}

/// Per-system means min–max normalized across systems, metric by metric.
pub fn build_system_profiles(tables: &[&MetricTable], corpus: &Corpus) -> Result<Vec<SystemProfile>> {
    let mut profiles = system_raw_means(tables, corpus);
    if profiles.len() < 2 {
        return Err(Error::TooFewSystems(profiles.len()));
    }
    let metrics: Vec<String> = profiles[0].metrics.keys().cloned().collect();
    for metric in metrics {
        let present: Vec<(usize, f64)> = profiles
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.metrics[&metric].raw_mean.map(|v| (i, v)))
            .collect();
        let values: Vec<f64> = present.iter().map(|(_, v)| *v).collect();
        for ((i, _), norm) in present.iter().zip(minmax_normalize(&values)) {
            profiles[*i].metrics.get_mut(&metric).unwrap().normalized = Some(norm);
        }
    }
    Ok(profiles)
}
