//! Per-object and per-researcher score formulas.
//!
//! Every function here is pure and deterministic. An object score is the
//! product of three components:
//!
//! * quality `q`, a weighted average of four FAIR sub-scores in `[0, 1]`;
//! * impact `i = 1 + ln(1 + T)` where `T` is the total reuse weight
//!   (with `i = 0` when `T = 0` under [`ZeroReusePolicy::Annihilate`]);
//! * collaboration `c = (1 + ln n_authors) * (1 + 0.5 ln n_institutions)`.
//!
//! A researcher's index is the plain sum of the scores of every object they
//! contributed to. Each contributor receives the full object score.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on the FAIR weight sum.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Coefficient applied to the institution term of the collaboration score.
pub const INSTITUTION_COEFFICIENT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("invalid FAIR weights: {0}")]
    InvalidWeights(String),
    #[error("invalid FAIR sub-score {dimension}={value}: must lie in [0, 1]")]
    InvalidSubScore { dimension: char, value: f64 },
    #[error("negative reuse weight {0}")]
    NegativeWeight(f64),
    #[error("non-finite reuse weight {0}")]
    NonFiniteWeight(f64),
    #[error("collaboration counts must be positive (authors={authors}, institutions={institutions})")]
    NonPositiveCount { authors: u64, institutions: u64 },
    #[error("{component} out of range: {value}")]
    OutOfRange { component: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, MetricError>;

/// Weights of the four FAIR dimensions. Non-negative, summing to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairWeights {
    pub f: f64,
    pub a: f64,
    pub i: f64,
    pub r: f64,
}

impl FairWeights {
    pub fn new(f: f64, a: f64, i: f64, r: f64) -> Result<Self> {
        let w = Self { f, a, i, r };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("f", self.f), ("a", self.a), ("i", self.i), ("r", self.r)] {
            if !v.is_finite() {
                return Err(MetricError::InvalidWeights(format!("weight {name} is not finite")));
            }
            if v < 0.0 {
                return Err(MetricError::InvalidWeights(format!("weight {name}={v} is negative")));
            }
        }
        let sum = self.f + self.a + self.i + self.r;
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(MetricError::InvalidWeights(format!(
                "weights sum to {sum}, expected 1 (tolerance {WEIGHT_SUM_TOLERANCE:e})"
            )));
        }
        Ok(())
    }
}

impl Default for FairWeights {
    fn default() -> Self {
        Self { f: 0.25, a: 0.25, i: 0.25, r: 0.25 }
    }
}

/// FAIR sub-scores, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FairSubScores {
    pub f: f64,
    pub a: f64,
    pub i: f64,
    pub r: f64,
}

impl FairSubScores {
    pub fn new(f: f64, a: f64, i: f64, r: f64) -> Result<Self> {
        let s = Self { f, a, i, r };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (dimension, value) in [('F', self.f), ('A', self.a), ('I', self.i), ('R', self.r)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(MetricError::InvalidSubScore { dimension, value });
            }
        }
        Ok(())
    }

    pub fn min(&self) -> f64 {
        self.f.min(self.a).min(self.i).min(self.r)
    }

    pub fn max(&self) -> f64 {
        self.f.max(self.a).max(self.i).max(self.r)
    }
}

/// Weight of a single reuse event.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReuseWeight(f64);

impl ReuseWeight {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(MetricError::NonFiniteWeight(value));
        }
        if value < 0.0 {
            return Err(MetricError::NegativeWeight(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Distinct contributing authors and institutions of one object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollaborationCounts {
    pub n_authors: u64,
    pub n_institutions: u64,
}

impl CollaborationCounts {
    pub fn new(n_authors: u64, n_institutions: u64) -> Result<Self> {
        if n_authors == 0 || n_institutions == 0 {
            return Err(MetricError::NonPositiveCount {
                authors: n_authors,
                institutions: n_institutions,
            });
        }
        Ok(Self { n_authors, n_institutions })
    }
}

/// What impact to assign when an object has no recorded reuse.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroReusePolicy {
    /// Unused objects contribute nothing: impact is 0.
    #[default]
    Annihilate,
    /// Evaluate the formula as written, giving impact 1 at zero reuse.
    Formula,
}

impl std::fmt::Display for ZeroReusePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Annihilate => "annihilate",
            Self::Formula => "formula",
        })
    }
}

/// Decomposed score of one data object. `s` is always `q * i * c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectScore {
    pub q: f64,
    pub i: f64,
    pub c: f64,
    pub s: f64,
}

/// Sum of object scores for one researcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResearcherIndex {
    pub researcher_id: String,
    pub s_total: f64,
    pub contributions: Vec<(String, ObjectScore)>,
}

pub fn quality_score(sub: &FairSubScores, w: &FairWeights) -> Result<f64> {
    w.validate()?;
    sub.validate()?;
    let q = w.f * sub.f + w.a * sub.a + w.i * sub.i + w.r * sub.r;
    // Weights may miss 1 by up to the tolerance.
    Ok(q.clamp(0.0, 1.0))
}

/// Total reuse weight, summed in slice order.
pub fn total_reuse_weight(weights: &[ReuseWeight]) -> f64 {
    weights.iter().fold(0.0, |acc, w| acc + w.0)
}

/// Impact of an object given the weights of its reuse events.
///
/// Weights are summed in slice order; callers that need reproducible results
/// across runs must pass them in a stable order.
pub fn impact_score(weights: &[ReuseWeight], policy: ZeroReusePolicy) -> Result<f64> {
    for w in weights {
        // ReuseWeight can be built through serde without its constructor.
        ReuseWeight::new(w.0)?;
    }
    Ok(impact_from_total(total_reuse_weight(weights), policy))
}

/// Impact as a function of the already-summed reuse weight `total >= 0`.
pub fn impact_from_total(total: f64, policy: ZeroReusePolicy) -> f64 {
    if total == 0.0 && policy == ZeroReusePolicy::Annihilate {
        0.0
    } else {
        1.0 + total.ln_1p()
    }
}

pub fn collaboration_score(counts: CollaborationCounts) -> Result<f64> {
    let CollaborationCounts { n_authors, n_institutions } = counts;
    if n_authors == 0 || n_institutions == 0 {
        return Err(MetricError::NonPositiveCount {
            authors: n_authors,
            institutions: n_institutions,
        });
    }
    let authors = 1.0 + (n_authors as f64).ln();
    let institutions = 1.0 + INSTITUTION_COEFFICIENT * (n_institutions as f64).ln();
    Ok(authors * institutions)
}

/// Combine components into an object score, computing `s = (q * i) * c`.
pub fn object_score(q: f64, i: f64, c: f64) -> Result<ObjectScore> {
    if !(0.0..=1.0).contains(&q) {
        return Err(MetricError::OutOfRange { component: "quality", value: q });
    }
    if !(i.is_finite() && i >= 0.0) {
        return Err(MetricError::OutOfRange { component: "impact", value: i });
    }
    if !(c.is_finite() && c >= 1.0) {
        return Err(MetricError::OutOfRange { component: "collaboration", value: c });
    }
    Ok(ObjectScore { q, i, c, s: q * i * c })
}

/// Sum object scores, in slice order, into a researcher index.
pub fn researcher_index(
    researcher_id: impl Into<String>,
    contributions: Vec<(String, ObjectScore)>,
) -> Result<ResearcherIndex> {
    for (_, score) in &contributions {
        let checked = object_score(score.q, score.i, score.c)?;
        if checked.s.to_bits() != score.s.to_bits() {
            return Err(MetricError::OutOfRange { component: "object score", value: score.s });
        }
    }
    let s_total = contributions.iter().fold(0.0, |acc, (_, score)| acc + score.s);
    Ok(ResearcherIndex { researcher_id: researcher_id.into(), s_total, contributions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weights(values: &[f64]) -> Vec<ReuseWeight> {
        values.iter().map(|&v| ReuseWeight::new(v).unwrap()).collect()
    }

    fn score(s_q: f64, s_i: f64, s_c: f64) -> ObjectScore {
        object_score(s_q, s_i, s_c).unwrap()
    }

    #[test]
    fn quality_examples() {
        let eq = FairWeights::default();
        let ones = FairSubScores::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(quality_score(&ones, &eq).unwrap(), 1.0);

        let alt = FairSubScores::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(quality_score(&alt, &eq).unwrap(), 0.5);

        // 0.9*0.4 + 0.8*0.2 + 0.6*0.2 + 0.7*0.2 = 0.36 + 0.16 + 0.12 + 0.14
        let sub = FairSubScores::new(0.9, 0.8, 0.6, 0.7).unwrap();
        let w = FairWeights::new(0.4, 0.2, 0.2, 0.2).unwrap();
        assert!((quality_score(&sub, &w).unwrap() - 0.78).abs() < 1e-12);
    }

    #[test]
    fn quality_rejects_bad_inputs() {
        let bad_sum = FairWeights { f: 0.3, a: 0.2, i: 0.2, r: 0.2 };
        let sub = FairSubScores { f: 0.5, a: 0.5, i: 0.5, r: 0.5 };
        assert!(matches!(quality_score(&sub, &bad_sum), Err(MetricError::InvalidWeights(_))));

        let negative = FairWeights { f: 1.25, a: -0.25, i: 0.0, r: 0.0 };
        assert!(matches!(quality_score(&sub, &negative), Err(MetricError::InvalidWeights(_))));

        let out = FairSubScores { f: 1.5, a: 0.5, i: 0.5, r: 0.5 };
        assert!(matches!(
            quality_score(&out, &FairWeights::default()),
            Err(MetricError::InvalidSubScore { dimension: 'F', .. })
        ));
    }

    #[test]
    fn impact_examples() {
        let p = ZeroReusePolicy::Annihilate;
        assert_eq!(impact_score(&[], p).unwrap(), 0.0);
        // mpmath: 1 + ln 2 = 1.693147180559945309...
        assert!((impact_score(&weights(&[1.0]), p).unwrap() - 1.693_147_180_559_945_3).abs() < 1e-12);
        // mpmath: 1 + ln 11 = 3.397895272798370544...
        let ten = weights(&[1.0; 10]);
        assert!((impact_score(&ten, p).unwrap() - 3.397_895_272_798_370_5).abs() < 1e-12);
    }

    #[test]
    fn impact_zero_policy() {
        assert_eq!(impact_score(&[], ZeroReusePolicy::Formula).unwrap(), 1.0);
        assert_eq!(impact_score(&weights(&[0.0, 0.0]), ZeroReusePolicy::Annihilate).unwrap(), 0.0);
        assert_eq!(impact_score(&weights(&[0.0]), ZeroReusePolicy::Formula).unwrap(), 1.0);
    }

    #[test]
    fn reuse_weight_validation() {
        assert_eq!(ReuseWeight::new(-0.5), Err(MetricError::NegativeWeight(-0.5)));
        assert!(matches!(ReuseWeight::new(f64::NAN), Err(MetricError::NonFiniteWeight(_))));
        assert!(matches!(ReuseWeight::new(f64::INFINITY), Err(MetricError::NonFiniteWeight(_))));
        let smuggled: ReuseWeight = serde_json::from_str("-1.0").unwrap();
        assert!(impact_score(&[smuggled], ZeroReusePolicy::Annihilate).is_err());
    }

    #[test]
    fn collaboration_examples() {
        let c = |a, i| collaboration_score(CollaborationCounts::new(a, i).unwrap()).unwrap();
        assert_eq!(c(1, 1), 1.0);
        // mpmath: (1 + ln 10)(1 + 0.5 ln 4) = 5.591762638762173238...
        assert!((c(10, 4) - 5.591_762_638_762_173).abs() < 1e-9);
        // mpmath: 1 + ln 5 = 2.609437912...
        assert!((c(5, 1) - 2.609_437_9).abs() < 1e-7);
        assert!(CollaborationCounts::new(0, 1).is_err());
        assert!(collaboration_score(CollaborationCounts { n_authors: 3, n_institutions: 0 }).is_err());
    }

    #[test]
    fn object_score_examples() {
        // mpmath: 0.8 * (1 + ln 2) * (1 + ln 10)(1 + 0.5 ln 4) = 7.574141716944490856...
        let i = 1.0 + 2f64.ln();
        let c = collaboration_score(CollaborationCounts::new(10, 4).unwrap()).unwrap();
        let s = score(0.8, i, c);
        assert!((s.s - 7.574_141_716_944_491).abs() < 1e-9);
        assert_eq!(score(1.0, 0.0, 9.9).s, 0.0);
        assert_eq!(score(0.0, 3.0, 2.0).s, 0.0);
        assert!(object_score(1.1, 1.0, 1.0).is_err());
        assert!(object_score(0.5, -1.0, 1.0).is_err());
        assert!(object_score(0.5, 1.0, 0.5).is_err());
        assert!(object_score(0.5, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn researcher_index_examples() {
        assert_eq!(researcher_index("orcid:x", vec![]).unwrap().s_total, 0.0);

        let a = score(0.8, 1.693_147_2, 5.591_762_6);
        let idx = researcher_index("orcid:x", vec![("doi:a".into(), a), ("doi:b".into(), score(1.0, 0.0, 2.0))])
            .unwrap();
        assert_eq!(idx.s_total, a.s);

        // s = 2.5, 3.25, 0.25 are exact in binary.
        let parts = vec![
            ("doi:a".to_string(), score(1.0, 2.5, 1.0)),
            ("doi:b".to_string(), score(1.0, 3.25, 1.0)),
            ("doi:c".to_string(), score(0.25, 1.0, 1.0)),
        ];
        assert_eq!(researcher_index("orcid:y", parts).unwrap().s_total, 6.0);
    }

    #[test]
    fn researcher_index_rejects_inconsistent_score() {
        let forged = ObjectScore { q: 1.0, i: 1.0, c: 1.0, s: 5.0 };
        assert!(researcher_index("orcid:x", vec![("doi:a".into(), forged)]).is_err());
    }
}
