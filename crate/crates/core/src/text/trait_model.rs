use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

use super::FeatureSpace;
use crate::{Error, Result};

/// Linear model over named features predicting a trait score.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTraitModel {
    pub trait_name: String,
    pub feature_space: FeatureSpace,
    pub intercept: f64,
    pub weights: BTreeMap<String, f64>,
}

impl LinearTraitModel {
    pub fn new(
        trait_name: impl Into<String>,
        feature_space: FeatureSpace,
        intercept: f64,
        weights: BTreeMap<String, f64>,
    ) -> Result<Self> {
        if !intercept.is_finite() {
            return Err(Error::NonFinite("model intercept".into()));
        }
        if let Some((k, _)) = weights.iter().find(|(_, w)| !w.is_finite()) {
            return Err(Error::NonFinite(format!("model weight `{k}`")));
        }
        Ok(LinearTraitModel {
            trait_name: trait_name.into(),
            feature_space,
            intercept,
            weights,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_weight() {
        let mut w = BTreeMap::new();
        w.insert("a".into(), f64::NAN);
        assert!(LinearTraitModel::new("t", FeatureSpace::Topic, 0.0, w).is_err());
        assert!(LinearTraitModel::new("t", FeatureSpace::Topic, f64::INFINITY, BTreeMap::new()).is_err());
    }
}
