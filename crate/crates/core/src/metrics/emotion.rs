use alloc::format;
use alloc::vec::Vec;

use super::{DegenerateReason, Scored};
use crate::stats::spearman;
use crate::text::{TokenSequence, WeightedLexicon};
use crate::{Error, Result};

/// Plutchik's basic emotions, in vector order.
pub const PLUTCHIK: [&str; 8] = [
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
];

/// Raw weighted emotion sums and their normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionVector {
    pub raw: [f64; 8],
    /// `raw / Σraw`; `None` when nothing in the text carried emotion weight.
    pub normalized: Option<[f64; 8]>,
}

impl EmotionVector {
    pub fn from_raw(raw: [f64; 8]) -> Self {
        let total: f64 = raw.iter().sum();
        let normalized = (total > 0.0).then(|| raw.map(|v| v / total));
        EmotionVector { raw, normalized }
    }

    pub fn is_zero(&self) -> bool {
        self.raw.iter().all(|v| *v == 0.0)
    }
}

/// An emotion lexicon whose categories are checked against [`PLUTCHIK`].
///
/// Categories absent from the lexicon simply score 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionLexicon {
    lexicon: WeightedLexicon,
    slots: Vec<usize>,
}

impl EmotionLexicon {
    pub fn new(lexicon: WeightedLexicon) -> Result<Self> {
        let mut slots = Vec::with_capacity(lexicon.categories().len());
        for cat in lexicon.categories() {
            let lower = cat.to_lowercase();
            let slot = PLUTCHIK.iter().position(|p| *p == lower).ok_or_else(|| {
                Error::Config(format!(
                    "emotion lexicon `{}` has non-Plutchik category `{cat}`",
                    lexicon.name
                ))
            })?;
            slots.push(slot);
        }
        Ok(EmotionLexicon { lexicon, slots })
    }

    pub fn lexicon(&self) -> &WeightedLexicon {
        &self.lexicon
    }

    pub fn vector(&self, tokens: &TokenSequence) -> EmotionVector {
        let mut raw = [0.0; 8];
        for tok in tokens.iter() {
            for &(c, w) in self.lexicon.term_weights(tok) {
                raw[self.slots[c]] += w;
            }
        }
        EmotionVector::from_raw(raw)
    }
}

/// Weighted Plutchik emotion scores for a token sequence.
pub fn emotion_vector(tokens: &TokenSequence, lexicon: &WeightedLexicon) -> Result<EmotionVector> {
    Ok(EmotionLexicon::new(lexicon.clone())?.vector(tokens))
}

/// Unit for entropy values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyBase {
    #[default]
    Nats,
    Bits,
}

impl EntropyBase {
    pub fn as_str(self) -> &'static str {
        match self {
            EntropyBase::Nats => "nats",
            EntropyBase::Bits => "bits",
        }
    }

    pub fn parse(s: &str) -> Option<EntropyBase> {
        match s {
            "nats" | "e" | "ln" => Some(EntropyBase::Nats),
            "bits" | "2" | "log2" => Some(EntropyBase::Bits),
            _ => None,
        }
    }

    /// Entropy of a uniform 8-way distribution in this unit.
    pub fn ceiling(self) -> f64 {
        match self {
            EntropyBase::Nats => libm::log(8.0),
            EntropyBase::Bits => 3.0,
        }
    }
}

/// Shannon entropy of the normalized vector in nats, `0 · ln 0 = 0`.
pub fn emotional_entropy(v: &EmotionVector) -> Option<f64> {
    let p = v.normalized?;
    let h: f64 = p
        .iter()
        .filter(|x| **x > 0.0)
        .map(|x| -x * libm::log(*x))
        .sum();
    // rounding can push a one-hot vector a hair below zero
    Some(h.max(0.0))
}

pub(crate) fn entropy_in(v: &EmotionVector, base: EntropyBase) -> Option<f64> {
    let h = emotional_entropy(v)?;
    Some(match base {
        EntropyBase::Nats => h,
        EntropyBase::Bits => h / core::f64::consts::LN_2,
    })
}

/// Spearman correlation between the two raw emotion vectors.
pub fn emotion_matching(agent: &EmotionVector, partner: &EmotionVector) -> Scored {
    if agent.is_zero() || partner.is_zero() {
        return Scored::Missing(DegenerateReason::ZeroEmotionVector);
    }
    match spearman(&agent.raw, &partner.raw) {
        Ok(Some(rho)) => Scored::Value(rho),
        _ => Scored::Missing(DegenerateReason::ConstantVector),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    fn lexicon() -> WeightedLexicon {
        let mut lex = WeightedLexicon::new("fixture");
        lex.add("happy", "joy", 2.0).unwrap();
        lex.add("sad", "sadness", 1.5).unwrap();
        lex
    }

    #[test]
    fn normalized_example() {
        let v = emotion_vector(&tokenize("happy happy sad"), &lexicon()).unwrap();
        let n = v.normalized.unwrap();
        assert!((n[4] - 4.0 / 5.5).abs() < 1e-15);
        assert!((n[5] - 1.5 / 5.5).abs() < 1e-15);
        assert_eq!(n.iter().filter(|x| **x == 0.0).count(), 6);
        let h = emotional_entropy(&v).unwrap();
        let (p, q) = (4.0f64 / 5.5, 1.5f64 / 5.5);
        assert!((h - (-p * p.ln() - q * q.ln())).abs() < 1e-15);
        assert!((h - 0.5860).abs() < 5e-5);
    }

    #[test]
    fn zero_hits_are_missing() {
        let v = emotion_vector(&tokenize("table chair"), &lexicon()).unwrap();
        assert_eq!(v.normalized, None);
        assert_eq!(emotional_entropy(&v), None);
        assert_eq!(
            emotion_matching(&v, &v),
            Scored::Missing(DegenerateReason::ZeroEmotionVector)
        );
    }

    #[test]
    fn one_hot_and_uniform() {
        let v = emotion_vector(&tokenize("sad sad"), &lexicon()).unwrap();
        assert_eq!(v.normalized.unwrap()[5], 1.0);
        assert_eq!(emotional_entropy(&v), Some(0.0));
        let u = EmotionVector::from_raw([0.5; 8]);
        assert!((emotional_entropy(&u).unwrap() - 8f64.ln()).abs() < 1e-15);
        assert!((entropy_in(&u, EntropyBase::Bits).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn wrong_categories_rejected() {
        let mut lex = lexicon();
        lex.add("meh", "boredom", 1.0).unwrap();
        assert!(emotion_vector(&tokenize("meh"), &lex).unwrap_err().is_config());
    }

    #[test]
    fn case_insensitive_categories() {
        let mut lex = WeightedLexicon::new("caps");
        lex.add("grr", "Anger", 1.0).unwrap();
        let v = emotion_vector(&tokenize("grr"), &lex).unwrap();
        assert_eq!(v.raw[0], 1.0);
    }

    #[test]
    fn matching_examples() {
        let a = EmotionVector::from_raw([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let b = EmotionVector::from_raw([8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(emotion_matching(&a, &a), Scored::Value(1.0));
        assert!((emotion_matching(&a, &b).value().unwrap() + 1.0).abs() < 1e-15);
        let c = EmotionVector::from_raw([1.0; 8]);
        assert_eq!(
            emotion_matching(&a, &c),
            Scored::Missing(DegenerateReason::ConstantVector)
        );
    }

    #[test]
    fn matching_with_ties() {
        // brute force: rank then Pearson
        let a = EmotionVector::from_raw([2.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let b = EmotionVector::from_raw([1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let ra = [6.5, 6.5, 8.0, 3.0, 3.0, 3.0, 3.0, 3.0];
        let rb = [6.0, 7.0, 8.0, 3.0, 3.0, 3.0, 3.0, 3.0];
        let m = |x: &[f64]| x.iter().sum::<f64>() / 8.0;
        let (ma, mb) = (m(&ra), m(&rb));
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for i in 0..8 {
            sab += (ra[i] - ma) * (rb[i] - mb);
            saa += (ra[i] - ma) * (ra[i] - ma);
            sbb += (rb[i] - mb) * (rb[i] - mb);
        }
        let expect = sab / (saa * sbb).sqrt();
        assert!((emotion_matching(&a, &b).value().unwrap() - expect).abs() < 1e-12);
    }
}
