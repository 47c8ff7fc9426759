use alloc::format;

use super::{DegenerateReason, Scored};
use crate::text::CategoryProfile;
use crate::{Error, Result};

/// Guard added to the per-category denominator.
pub const LSM_EPSILON: f64 = 0.0001;

/// Language style matching between two function-word profiles.
///
/// Per category `1 − |a − p| / (a + p + ε)`, averaged over categories. Either
/// profile coming from empty text makes the score missing.
pub fn language_style_matching(agent: &CategoryProfile, partner: &CategoryProfile) -> Result<Scored> {
    if agent.categories != partner.categories {
        return Err(Error::Config(format!(
            "category mismatch: {:?} vs {:?}",
            agent.categories, partner.categories
        )));
    }
    if agent.categories.is_empty() {
        return Err(Error::Config("function-word dictionary has no categories".into()));
    }
    if agent.is_degenerate() || partner.is_degenerate() {
        return Ok(Scored::Missing(DegenerateReason::EmptyText));
    }
    let total: f64 = agent
        .proportions
        .iter()
        .zip(&partner.proportions)
        .map(|(a, p)| 1.0 - (a - p).abs() / (a + p + LSM_EPSILON))
        .sum();
    Ok(Scored::Value(total / agent.categories.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec::Vec;

    fn profile(values: &[f64]) -> CategoryProfile {
        CategoryProfile {
            categories: (0..values.len()).map(|i| alloc::format!("c{i}")).collect::<Vec<String>>(),
            proportions: values.to_vec(),
            token_count: 10,
        }
    }

    #[test]
    fn identical_profiles() {
        let p = profile(&[0.1, 0.2, 0.05]);
        assert_eq!(language_style_matching(&p, &p).unwrap(), Scored::Value(1.0));
    }

    #[test]
    fn epsilon_examples() {
        let v = language_style_matching(&profile(&[0.2]), &profile(&[0.0])).unwrap().value().unwrap();
        assert!((v - (1.0 - 0.2 / 0.2001)).abs() < 1e-15);
        assert!((v - 0.0005).abs() < 1e-4);
        let v = language_style_matching(&profile(&[0.15]), &profile(&[0.05])).unwrap().value().unwrap();
        assert!((v - (1.0 - 0.10 / 0.2001)).abs() < 1e-15);
        assert!((v - 0.5002).abs() < 1e-4);
    }

    #[test]
    fn mismatched_categories() {
        let a = profile(&[0.1, 0.2]);
        let b = profile(&[0.1]);
        assert!(language_style_matching(&a, &b).unwrap_err().is_config());
    }

    #[test]
    fn empty_text_is_missing() {
        let a = profile(&[0.1, 0.2]);
        let mut b = profile(&[0.0, 0.0]);
        b.token_count = 0;
        assert_eq!(
            language_style_matching(&a, &b).unwrap(),
            Scored::Missing(DegenerateReason::EmptyText)
        );
    }
}
