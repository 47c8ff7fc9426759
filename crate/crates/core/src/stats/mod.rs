//! Statistical primitives for the evaluation harness.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

mod cluster;
mod correlation;
pub(crate) mod linalg;
mod regression;
mod ttest;

pub use cluster::{cluster_order, cluster_tree, Dendrogram, Merge};
pub use correlation::{average_ranks, pearson, spearman};
pub use regression::{adjusted_r2, ols_fit, standardize, Predictor, RegressionResult};
pub use ttest::{
    paired_t_test, regularized_incomplete_beta, student_t_cdf, student_t_two_sided_p, TTest,
};

/// Multiple-comparison correction applied to regression p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correction {
    #[default]
    Bonferroni,
    /// Listed so configurations can name it; rejected when applied.
    BenjaminiHochberg,
}

impl Correction {
    pub fn name(self) -> &'static str {
        match self {
            Correction::Bonferroni => "bonferroni",
            Correction::BenjaminiHochberg => "benjamini-hochberg",
        }
    }

    /// Adjusts one p-value out of a family of `m` comparisons.
    pub fn apply(self, p: f64, m: usize) -> Result<f64> {
        match self {
            Correction::Bonferroni => bonferroni(p, m),
            Correction::BenjaminiHochberg => Err(Error::Config(
                "benjamini-hochberg correction is not implemented".into(),
            )),
        }
    }
}

/// Significance marker derived from a corrected p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stars {
    None,
    One,
    Two,
    Three,
}

impl Stars {
    pub fn from_p(p: f64) -> Stars {
        if p < 0.001 {
            Stars::Three
        } else if p < 0.01 {
            Stars::Two
        } else if p < 0.05 {
            Stars::One
        } else {
            Stars::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stars::None => "",
            Stars::One => "*",
            Stars::Two => "**",
            Stars::Three => "***",
        }
    }

    pub fn parse(s: &str) -> Option<Stars> {
        match s {
            "" => Some(Stars::None),
            "*" => Some(Stars::One),
            "**" => Some(Stars::Two),
            "***" => Some(Stars::Three),
            _ => None,
        }
    }
}

/// `min(1, p * m)`.
pub fn bonferroni(p: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "p-value {p} outside [0, 1]"
        )));
    }
    if m == 0 {
        return Err(Error::InvalidArgument(
            "number of comparisons must be at least 1".into(),
        ));
    }
    Ok((p * m as f64).min(1.0))
}

/// Rescales to `[0, 1]`; an all-equal input maps to 0.5 everywhere.
pub fn minmax_normalize(values: &[f64]) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = hi - lo;
    values
        .iter()
        .map(|&v| {
            if range > 0.0 {
                ((v - lo) / range).clamp(0.0, 1.0)
            } else {
                0.5
            }
        })
        .collect()
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n - 1 denominator).
pub(crate) fn sample_sd(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (values.len() as f64 - 1.0))
}
