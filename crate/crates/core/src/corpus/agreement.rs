use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Corpus, Level};
use crate::{Error, Result};

/// Difference function between two rating values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Difference {
    /// `|v − v′|`
    #[default]
    Linear,
    /// `(v − v′)²`
    Interval,
    /// 0 if equal, else 1
    Nominal,
}

impl Difference {
    pub fn delta(self, a: f64, b: f64) -> f64 {
        match self {
            Difference::Linear => (a - b).abs(),
            Difference::Interval => (a - b) * (a - b),
            Difference::Nominal => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Difference::Linear => "linear",
            Difference::Interval => "interval",
            Difference::Nominal => "nominal",
        }
    }

    pub fn parse(s: &str) -> Option<Difference> {
        match s {
            "linear" => Some(Difference::Linear),
            "interval" => Some(Difference::Interval),
            "nominal" => Some(Difference::Nominal),
            _ => None,
        }
    }
}

/// Annotator × unit ratings with gaps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReliabilityMatrix {
    rows: Vec<Vec<Option<f64>>>,
}

impl ReliabilityMatrix {
    /// Each inner vector is one annotator's ratings over the same units.
    pub fn new(rows: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            if let Some(bad) = rows.iter().find(|r| r.len() != first.len()) {
                return Err(Error::LengthMismatch {
                    left: first.len(),
                    right: bad.len(),
                });
            }
        }
        Ok(ReliabilityMatrix { rows })
    }

    pub fn annotators(&self) -> usize {
        self.rows.len()
    }

    pub fn units(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Non-missing values of each unit.
    pub fn unit_values(&self) -> Vec<Vec<f64>> {
        (0..self.units())
            .map(|u| self.rows.iter().filter_map(|r| r[u]).collect())
            .collect()
    }
}

/// Krippendorff's alpha via the coincidence matrix.
///
/// Units with fewer than two ratings do not enter the coincidences. If every
/// pairable value is identical the expected disagreement is zero and alpha is
/// reported as 1.
pub fn krippendorff_alpha(reliability: &ReliabilityMatrix, difference: Difference) -> Result<f64> {
    let units: Vec<Vec<f64>> = reliability
        .unit_values()
        .into_iter()
        .filter(|v| v.len() >= 2)
        .collect();
    if units.len() < 2 {
        return Err(Error::InsufficientAgreementData);
    }

    let mut values: Vec<f64> = units.iter().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let index = |v: f64| values.binary_search_by(|x| x.total_cmp(&v)).unwrap();

    let k = values.len();
    let mut coincidence = vec![vec![0.0; k]; k];
    for unit in &units {
        let weight = 1.0 / (unit.len() as f64 - 1.0);
        for (i, &a) in unit.iter().enumerate() {
            for (j, &b) in unit.iter().enumerate() {
                if i != j {
                    coincidence[index(a)][index(b)] += weight;
                }
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            let delta = difference.delta(values[c], values[d]);
            observed += coincidence[c][d] * delta;
            expected += marginals[c] * marginals[d] * delta;
        }
    }
    observed /= n;
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - observed / expected)
}

/// Per-dimension alpha plus their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct AgreementReport {
    pub level: Level,
    pub difference: Difference,
    /// `None` where the dimension lacked enough paired ratings.
    pub alphas: BTreeMap<String, Option<f64>>,
    pub mean: Option<f64>,
}

/// Builds the annotator × unit matrix for one dimension. Annotators are
/// identified by explicit id when given, else by position in the list.
fn reliability_for(corpus: &Corpus, level: Level, dimension: &str) -> ReliabilityMatrix {
    let units = corpus.units(level);
    let mut annotators: BTreeMap<String, usize> = BTreeMap::new();
    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    for (u, (_, ann)) in units.iter().enumerate() {
        let Some(ratings) = ann.get(dimension) else {
            continue;
        };
        for (pos, r) in ratings.iter().enumerate() {
            let Some(v) = r.value else { continue };
            let name = match &r.annotator {
                Some(a) => format!("id:{a}"),
                None => format!("pos:{pos}"),
            };
            let next = annotators.len();
            let a = *annotators.entry(name).or_insert(next);
            cells.push((a, u, v));
        }
    }
    let mut rows = vec![vec![None; units.len()]; annotators.len()];
    for (a, u, v) in cells {
        rows[a][u] = Some(v);
    }
    ReliabilityMatrix { rows }
}

/// Alpha for every judgement dimension annotated at `level`.
pub fn agreement_report(corpus: &Corpus, level: Level, difference: Difference) -> Result<AgreementReport> {
    let dims = corpus.dimensions(level);
    let mut alphas = BTreeMap::new();
    for dim in &dims {
        let alpha = krippendorff_alpha(&reliability_for(corpus, level, dim), difference).ok();
        alphas.insert(dim.clone(), alpha);
    }
    let present: Vec<f64> = alphas.values().flatten().copied().collect();
    if dims.is_empty() || present.is_empty() {
        return Err(Error::NoAnnotations);
    }
    let mean = Some(present.iter().sum::<f64>() / present.len() as f64);
    Ok(AgreementReport {
        level,
        difference,
        alphas,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Dialog, ScaleBounds, Speaker, Turn};

    fn matrix(pairs: &[(f64, f64)]) -> ReliabilityMatrix {
        ReliabilityMatrix::new(vec![
            pairs.iter().map(|p| Some(p.0)).collect(),
            pairs.iter().map(|p| Some(p.1)).collect(),
        ])
        .unwrap()
    }

    #[test]
    fn perfect_agreement() {
        let m = matrix(&[(3.0, 3.0), (3.0, 3.0), (3.0, 3.0), (3.0, 3.0)]);
        assert_eq!(krippendorff_alpha(&m, Difference::Linear).unwrap(), 1.0);
        let m = matrix(&[(1.0, 1.0), (2.0, 2.0), (5.0, 5.0), (4.0, 4.0)]);
        assert_eq!(krippendorff_alpha(&m, Difference::Linear).unwrap(), 1.0);
    }

    #[test]
    fn hand_built_coincidences() {
        // values 1,2,3,4; n = 10
        // o(1,1)=4 o(2,2)=2 o(3,3)=2 o(3,4)=o(4,3)=1; n_c = (4,2,3,1)
        // Do = 2/10 = 0.2
        // De = 2*(4*2*1 + 4*3*2 + 4*1*3 + 2*3*1 + 2*1*2 + 3*1*1)/90 = 2*57/90
        let m = matrix(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (3.0, 4.0), (1.0, 1.0)]);
        let alpha = krippendorff_alpha(&m, Difference::Linear).unwrap();
        let expect = 1.0 - 0.2 / (114.0 / 90.0);
        assert!((alpha - expect).abs() < 1e-14);
    }

    #[test]
    fn insufficient_data() {
        let m = ReliabilityMatrix::new(vec![vec![Some(1.0), Some(2.0)], vec![Some(1.0), None]]).unwrap();
        assert_eq!(
            krippendorff_alpha(&m, Difference::Linear),
            Err(Error::InsufficientAgreementData)
        );
    }

    #[test]
    fn missing_cells_are_skipped() {
        let m = ReliabilityMatrix::new(vec![
            vec![Some(1.0), Some(2.0), None, Some(4.0)],
            vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)],
            vec![None, Some(2.0), Some(3.0), None],
        ])
        .unwrap();
        assert_eq!(krippendorff_alpha(&m, Difference::Interval).unwrap(), 1.0);
    }

    #[test]
    fn ragged_matrix_rejected() {
        assert!(ReliabilityMatrix::new(vec![vec![Some(1.0)], vec![]]).is_err());
    }

    fn annotated_corpus() -> Corpus {
        let mut bounds = BTreeMap::new();
        for d in ["coherence", "overall", "content"] {
            bounds.insert(d.into(), ScaleBounds::LIKERT_5);
        }
        let dialogs = (0..4)
            .map(|i| {
                let v = 1.0 + i as f64;
                let turn = Turn::new("t1", Speaker::Agent, "x").with_ratings("content", &[v]);
                Dialog::new(alloc::format!("d{i}"), "s", vec![turn])
                    .with_ratings("coherence", &[v, v])
                    .with_ratings("overall", &[v, if i % 2 == 0 { v } else { 5.0 - v }])
            })
            .collect();
        Corpus::new("c", dialogs, bounds).unwrap()
    }

    #[test]
    fn report_matches_direct_alpha() {
        let c = annotated_corpus();
        let r = agreement_report(&c, Level::Dialog, Difference::Linear).unwrap();
        assert_eq!(r.alphas["coherence"], Some(1.0));
        let direct = krippendorff_alpha(
            &matrix(&[(1.0, 1.0), (2.0, 3.0), (3.0, 3.0), (4.0, 1.0)]),
            Difference::Linear,
        )
        .unwrap();
        assert!((r.alphas["overall"].unwrap() - direct).abs() < 1e-15);
        assert!((r.mean.unwrap() - (1.0 + direct) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_rating_dimension_is_missing() {
        let c = annotated_corpus();
        // turn level only has one rating per unit
        assert_eq!(
            agreement_report(&c, Level::Turn, Difference::Linear),
            Err(Error::NoAnnotations)
        );
    }

    #[test]
    fn explicit_annotator_ids() {
        let mut bounds = BTreeMap::new();
        bounds.insert("overall".into(), ScaleBounds::LIKERT_5);
        let rating = |a: &str, v: f64| super::super::Rating {
            annotator: Some(a.into()),
            value: Some(v),
        };
        let mut dialogs = Vec::new();
        for (i, (x, y)) in [(1.0, 1.0), (4.0, 4.0), (2.0, 2.0)].iter().enumerate() {
            let mut d = Dialog::new(alloc::format!("d{i}"), "s", vec![Turn::new("t", Speaker::Agent, "x")]);
            // order differs between dialogs; ids keep annotators aligned
            let ratings = if i % 2 == 0 {
                vec![rating("ann-a", *x), rating("ann-b", *y)]
            } else {
                vec![rating("ann-b", *y), rating("ann-a", *x)]
            };
            d.annotations.insert("overall".into(), ratings);
            dialogs.push(d);
        }
        let c = Corpus::new("c", dialogs, bounds).unwrap();
        let r = agreement_report(&c, Level::Dialog, Difference::Linear).unwrap();
        assert_eq!(r.mean, Some(1.0));
    }
}
