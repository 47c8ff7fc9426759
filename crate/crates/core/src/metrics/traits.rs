use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::stats::linalg::least_squares;
use crate::stats::pearson;
use crate::text::{FeatureVector, LinearTraitModel};
use crate::{Error, Result};

/// `intercept + Σ weight(f) · feature(f)`; features missing on either side add 0.
pub fn apply_trait_model(features: &FeatureVector, model: &LinearTraitModel) -> Result<f64> {
    if features.space != model.feature_space {
        return Err(Error::FeatureSpaceMismatch {
            expected: model.feature_space.as_str(),
            found: features.space.as_str(),
        });
    }
    // iterate the smaller side
    let dot: f64 = if features.values.len() <= model.weights.len() {
        features
            .values
            .iter()
            .filter_map(|(k, v)| model.weights.get(k).map(|w| w * v))
            .sum()
    } else {
        model
            .weights
            .iter()
            .filter_map(|(k, w)| features.values.get(k).map(|v| w * v))
            .sum()
    };
    Ok(model.intercept + dot)
}

/// Ridge regression with an unpenalized intercept.
///
/// Minimizes `‖y − Xw − b‖² + λ‖w‖²` over the union of feature names. The
/// intercept is removed by centering; the penalized problem is solved as the
/// augmented least-squares system `[Xc; √λ I] w ≈ [yc; 0]` with Householder QR.
pub fn train_ridge(x: &[FeatureVector], y: &[f64], lambda: f64) -> Result<LinearTraitModel> {
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ridge penalty must be a finite value >= 0, got {lambda}"
        )));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            got: x.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("ridge targets".into()));
    }
    let space = x[0].space;
    if let Some(bad) = x.iter().find(|f| f.space != space) {
        return Err(Error::FeatureSpaceMismatch {
            expected: space.as_str(),
            found: bad.space.as_str(),
        });
    }

    let names: Vec<&String> = x
        .iter()
        .flat_map(|f| f.values.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = x.len();
    let p = names.len();
    let y_mean = y.iter().sum::<f64>() / n as f64;

    let mut means = Vec::with_capacity(p);
    let mut cols = Vec::with_capacity(p);
    for (j, name) in names.iter().enumerate() {
        let col: Vec<f64> = x.iter().map(|f| f.get(name)).collect();
        let m = col.iter().sum::<f64>() / n as f64;
        let mut centered: Vec<f64> = col.iter().map(|v| v - m).collect();
        if lambda > 0.0 {
            centered.resize(n + p, 0.0);
            centered[n + j] = libm::sqrt(lambda);
        }
        means.push(m);
        cols.push(centered);
    }
    let mut rhs: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    if lambda > 0.0 {
        rhs.resize(n + p, 0.0);
    }

    let w = if p == 0 {
        Vec::new()
    } else {
        least_squares(cols, rhs).map_err(|j| Error::RankDeficient {
            column: names[j].clone(),
            with: names[..j].iter().map(|s| (*s).clone()).collect(),
        })?
    };

    let intercept = y_mean - means.iter().zip(&w).map(|(m, w)| m * w).sum::<f64>();
    let weights: BTreeMap<String, f64> = names.into_iter().cloned().zip(w).collect();
    LinearTraitModel::new("trait", space, intercept, weights)
}

/// Out-of-fold predictions and their correlation with the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub folds: usize,
    pub lambda: f64,
    pub predictions: Vec<f64>,
    /// Pearson r between predictions and targets; `None` if either is constant.
    pub r: Option<f64>,
}

/// k-fold cross-validated ridge. Row `i` belongs to fold `i mod k`.
pub fn cross_validate_ridge(x: &[FeatureVector], y: &[f64], lambda: f64, k: usize) -> Result<CrossValidation> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {k}")));
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {} rows",
            x.len()
        )));
    }
    let mut predictions = vec![0.0; x.len()];
    for fold in 0..k {
        let (mut train_x, mut train_y) = (Vec::new(), Vec::new());
        for (i, (f, t)) in x.iter().zip(y).enumerate() {
            if i % k != fold {
                train_x.push(f.clone());
                train_y.push(*t);
            }
        }
        let model = train_ridge(&train_x, &train_y, lambda)?;
        for i in (fold..x.len()).step_by(k) {
            predictions[i] = apply_trait_model(&x[i], &model)?;
        }
    }
    let r = pearson(&predictions, y)?;
    Ok(CrossValidation {
        folds: k,
        lambda,
        predictions,
        r,
    })
}
