use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::least_squares;
use super::{mean, sample_sd};
use crate::{Error, Result};

/// A named predictor column.
#[derive(Debug, Clone, PartialEq)]
pub struct Predictor {
    pub name: String,
    pub values: Vec<f64>,
}

impl Predictor {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Predictor {
            name: name.into(),
            values,
        }
    }
}

/// Fitted ordinary least squares model.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub coefficients: BTreeMap<String, f64>,
    pub intercept: f64,
    pub r2: f64,
    pub adjusted_r2: f64,
    /// In the (possibly standardized) scale the model was fitted on.
    pub residuals: Vec<f64>,
    pub n: usize,
    pub p: usize,
}

/// `1 − (1 − r²)(n − 1)/(n − p − 1)`.
pub fn adjusted_r2(r2: f64, n: usize, p: usize) -> f64 {
    1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64 - 1.0)
}

/// Mean 0, sample standard deviation 1. `None` for constant input.
pub fn standardize(values: &[f64]) -> Option<Vec<f64>> {
    if values.len() < 2 {
        return None;
    }
    let m = mean(values);
    let sd = sample_sd(values);
    if sd <= 0.0 || !sd.is_finite() {
        return None;
    }
    Some(values.iter().map(|v| (v - m) / sd).collect())
}

/// Least squares with intercept, solved by Householder QR.
///
/// With `standardize` set, every predictor and the response are z-scored
/// before fitting, so coefficients are standardized betas and residuals are
/// in response-sd units.
pub fn ols_fit(predictors: &[Predictor], y: &[f64], standardize_all: bool) -> Result<RegressionResult> {
    let n = y.len();
    let p = predictors.len();
    for pr in predictors {
        if pr.values.len() != n {
            return Err(Error::LengthMismatch {
                left: pr.values.len(),
                right: n,
            });
        }
    }
    if n <= p + 1 {
        return Err(Error::TooFewObservations {
            needed: p + 2,
            got: n,
        });
    }
    if y.iter().chain(predictors.iter().flat_map(|p| p.values.iter())).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("regression input".into()));
    }

    let response = if standardize_all {
        standardize(y).ok_or_else(|| Error::ConstantPredictor("response".into()))?
    } else {
        y.to_vec()
    };

    let mut cols = Vec::with_capacity(p + 1);
    cols.push(vec![1.0; n]);
    for pr in predictors {
        if standardize_all {
            cols.push(standardize(&pr.values).ok_or_else(|| Error::ConstantPredictor(pr.name.clone()))?);
        } else {
            cols.push(pr.values.clone());
        }
    }

    let beta = match least_squares(cols.clone(), response.clone()) {
        Ok(b) => b,
        Err(j) => {
            let name = |k: usize| -> String {
                if k == 0 {
                    "intercept".to_string()
                } else {
                    predictors[k - 1].name.clone()
                }
            };
            return Err(Error::RankDeficient {
                column: name(j),
                with: (0..j).map(name).collect(),
            });
        }
    };

    let residuals: Vec<f64> = (0..n)
        .map(|i| response[i] - cols.iter().zip(&beta).map(|(c, b)| c[i] * b).sum::<f64>())
        .collect();
    let ym = mean(&response);
    let sst: f64 = response.iter().map(|v| (v - ym) * (v - ym)).sum();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 0.0 };

    let coefficients = predictors
        .iter()
        .zip(&beta[1..])
        .map(|(pr, b)| (pr.name.clone(), *b))
        .collect();

    Ok(RegressionResult {
        coefficients,
        intercept: beta[0],
        r2,
        adjusted_r2: adjusted_r2(r2, n, p),
        residuals,
        n,
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::pearson;

    #[test]
    fn exact_fit() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let fit = ols_fit(&[Predictor::new("x", x)], &y, false).unwrap();
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!((fit.adjusted_r2 - 1.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!((fit.coefficients["x"] - 2.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn standardized_slope_is_pearson() {
        let x = vec![0.5, 1.7, 2.2, 3.9, 4.1, 5.0, 6.3];
        let y = vec![1.0, 1.5, 3.5, 2.0, 5.0, 4.4, 7.0];
        let fit = ols_fit(&[Predictor::new("x", x.clone())], &y, true).unwrap();
        let r = pearson(&x, &y).unwrap().unwrap();
        assert!((fit.coefficients["x"] - r).abs() < 1e-9);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn adjusted_formula() {
        assert!((adjusted_r2(0.5, 12, 1) - 0.45).abs() < 1e-15);
        assert!(adjusted_r2(0.0, 10, 3) < 0.0);
    }

    #[test]
    fn rejects_small_n() {
        let err = ols_fit(&[Predictor::new("x", vec![1.0, 2.0])], &[1.0, 2.0], false).unwrap_err();
        assert!(matches!(err, Error::TooFewObservations { .. }));
    }

    #[test]
    fn names_collinear_column() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 6.0];
        let b: Vec<f64> = a.iter().map(|v| 0.5 * v + 1.0).collect();
        let err = ols_fit(
            &[Predictor::new("a", a), Predictor::new("b", b)],
            &[1.0, 3.0, 2.0, 5.0, 4.0],
            false,
        )
        .unwrap_err();
        match err {
            Error::RankDeficient { column, with } => {
                assert_eq!(column, "b");
                assert_eq!(with, ["intercept", "a"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_predictor_rejected_when_standardizing() {
        let err = ols_fit(
            &[Predictor::new("c", vec![2.0; 5])],
            &[1.0, 2.0, 3.0, 4.0, 5.0],
            true,
        )
        .unwrap_err();
        assert_eq!(err, Error::ConstantPredictor("c".into()));
    }

    #[test]
    fn standardize_moments() {
        let z = standardize(&[3.0, 9.0, 1.0, 4.0, 4.5]).unwrap();
        assert!(mean(&z).abs() < 1e-12);
        assert!((sample_sd(&z) - 1.0).abs() < 1e-12);
        assert!(standardize(&[1.0, 1.0]).is_none());
    }
}
