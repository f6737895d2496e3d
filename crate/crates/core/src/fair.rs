//! Rule-based FAIR assessment with curator overrides.
//!
//! Each of the four dimensions is scored by a small table of rules loaded
//! from a TOML rule file. A rule names a predicate over [`ObjectMetadata`]
//! and the points it awards; the points of one dimension sum to 1, so every
//! computed sub-score lies in `[0, 1]`. Curators may replace any computed
//! dimension with a verified value; the latest override by timestamp wins.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::FairSubScores;

/// Tolerance on the per-dimension point total of a rule file.
pub const POINTS_TOLERANCE: f64 = 1e-9;

const DEFAULT_RULES: &str = include_str!("../rules/default.toml");

#[derive(Debug, Error)]
pub enum FairError {
    #[error("failed to read rule file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse rule file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid rule set: {0}")]
    InvalidRules(String),
    #[error("conflicting curator overrides for {object_id} dimension {dimension} at {timestamp}")]
    AmbiguousOverride {
        object_id: String,
        dimension: Dimension,
        timestamp: DateTime<Utc>,
    },
    #[error("override for {found} supplied while assessing {expected}")]
    ForeignOverride { expected: String, found: String },
    #[error("override value {0} outside [0, 1]")]
    OverrideValue(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    F,
    A,
    I,
    R,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [Dimension::F, Dimension::A, Dimension::I, Dimension::R];
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::F => "F",
            Dimension::A => "A",
            Dimension::I => "I",
            Dimension::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentifierScheme {
    Doi,
    Handle,
    Ark,
    Url,
    #[default]
    None,
}

impl IdentifierScheme {
    pub fn is_persistent(self) -> bool {
        matches!(self, Self::Doi | Self::Handle | Self::Ark)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccessProtocol {
    Https,
    Ftp,
    Other,
    #[default]
    None,
}

/// Repository metadata describing one data object.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectMetadata {
    #[serde(default)]
    pub identifier_scheme: IdentifierScheme,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description_chars: u64,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub access_url: Option<String>,
    #[serde(default)]
    pub access_protocol: AccessProtocol,
    #[serde(default)]
    pub formats: Vec<String>,
    #[serde(default)]
    pub uses_standard_schema: bool,
    #[serde(default)]
    pub has_provenance: bool,
    #[serde(default)]
    pub completeness_ratio: f64,
}

impl ObjectMetadata {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.completeness_ratio) {
            return Err(format!("completeness_ratio {} outside [0, 1]", self.completeness_ratio));
        }
        Ok(())
    }
}

/// A curator-verified value for one FAIR dimension of one object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuratorOverride {
    pub object_id: String,
    pub dimension: Dimension,
    pub value: f64,
    pub curator_id: String,
    pub timestamp: DateTime<Utc>,
}

impl CuratorOverride {
    pub fn validate(&self) -> Result<(), FairError> {
        if !(0.0..=1.0).contains(&self.value) {
            return Err(FairError::OverrideValue(self.value));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    PersistentIdentifier,
    RichMetadata,
    AccessUrl,
    OpenLicense,
    HttpsProtocol,
    StandardFormat,
    StandardSchema,
    LicensePresent,
    Provenance,
    Completeness,
}

impl Predicate {
    pub const ALL: [Predicate; 10] = [
        Predicate::PersistentIdentifier,
        Predicate::RichMetadata,
        Predicate::AccessUrl,
        Predicate::OpenLicense,
        Predicate::HttpsProtocol,
        Predicate::StandardFormat,
        Predicate::StandardSchema,
        Predicate::LicensePresent,
        Predicate::Provenance,
        Predicate::Completeness,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub id: String,
    pub predicate: Predicate,
    pub points: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub description_chars: u64,
    pub keywords: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { description_chars: 200, keywords: 3 }
    }
}

/// Versioned per-dimension rule tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSet {
    pub version: u32,
    #[serde(default)]
    pub thresholds: Thresholds,
    pub findability: Vec<Rule>,
    pub accessibility: Vec<Rule>,
    pub interoperability: Vec<Rule>,
    pub reusability: Vec<Rule>,
}

impl RuleSet {
    pub fn from_toml_str(text: &str) -> Result<Self, FairError> {
        let rules: RuleSet = toml::from_str(text)?;
        rules.validate()?;
        Ok(rules)
    }

    pub fn load(path: &Path) -> Result<Self, FairError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| FairError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn rules(&self, dimension: Dimension) -> &[Rule] {
        match dimension {
            Dimension::F => &self.findability,
            Dimension::A => &self.accessibility,
            Dimension::I => &self.interoperability,
            Dimension::R => &self.reusability,
        }
    }

    pub fn validate(&self) -> Result<(), FairError> {
        let mut ids = BTreeSet::new();
        for dimension in Dimension::ALL {
            let rules = self.rules(dimension);
            if rules.is_empty() {
                return Err(FairError::InvalidRules(format!("dimension {dimension} has no rules")));
            }
            let mut total = 0.0;
            for rule in rules {
                if !ids.insert(rule.id.as_str()) {
                    return Err(FairError::InvalidRules(format!("duplicate rule id {}", rule.id)));
                }
                if !(rule.points.is_finite() && rule.points >= 0.0) {
                    return Err(FairError::InvalidRules(format!(
                        "rule {} has invalid points {}",
                        rule.id, rule.points
                    )));
                }
                total += rule.points;
            }
            if (total - 1.0).abs() > POINTS_TOLERANCE {
                return Err(FairError::InvalidRules(format!(
                    "points for dimension {dimension} sum to {total}, expected 1"
                )));
            }
        }
        Ok(())
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_RULES).expect("bundled rule file is valid")
    }
}

/// License identifiers and media types the rules treat as open / standard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub open_licenses: BTreeSet<String>,
    pub standard_formats: BTreeSet<String>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        Self {
            open_licenses: set(&["CC0-1.0", "CC-BY-4.0", "CC-BY-SA-4.0", "MIT", "Apache-2.0"]),
            standard_formats: set(&[
                "text/csv",
                "application/json",
                "application/x-netcdf",
                "application/x-parquet",
                "text/tab-separated-values",
            ]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Curated,
}

/// One fired rule and the points it contributed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleHit {
    pub dimension: Dimension,
    pub rule_id: String,
    pub points: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionProvenance {
    pub f: Provenance,
    pub a: Provenance,
    pub i: Provenance,
    pub r: Provenance,
}

impl DimensionProvenance {
    pub fn get(&self, d: Dimension) -> Provenance {
        match d {
            Dimension::F => self.f,
            Dimension::A => self.a,
            Dimension::I => self.i,
            Dimension::R => self.r,
        }
    }

    fn set(&mut self, d: Dimension, p: Provenance) {
        match d {
            Dimension::F => self.f = p,
            Dimension::A => self.a = p,
            Dimension::I => self.i = p,
            Dimension::R => self.r = p,
        }
    }

    pub fn curated(&self) -> Vec<Dimension> {
        Dimension::ALL.into_iter().filter(|&d| self.get(d) == Provenance::Curated).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairAssessment {
    /// Final sub-scores after overrides.
    pub sub_scores: FairSubScores,
    /// Rule-computed sub-scores, before overrides.
    pub computed: FairSubScores,
    pub provenance: DimensionProvenance,
    pub rule_trace: Vec<RuleHit>,
    /// The override that decided each curated dimension.
    pub applied_overrides: Vec<CuratorOverride>,
}

impl FairAssessment {
    /// Sum of the trace points recorded for one dimension, clamped to `[0, 1]`.
    pub fn trace_total(&self, dimension: Dimension) -> f64 {
        sum_points(self.rule_trace.iter().filter(|h| h.dimension == dimension).map(|h| h.points))
    }
}

pub fn sub_score(s: &FairSubScores, d: Dimension) -> f64 {
    match d {
        Dimension::F => s.f,
        Dimension::A => s.a,
        Dimension::I => s.i,
        Dimension::R => s.r,
    }
}

fn set_sub_score(s: &mut FairSubScores, d: Dimension, v: f64) {
    match d {
        Dimension::F => s.f = v,
        Dimension::A => s.a = v,
        Dimension::I => s.i = v,
        Dimension::R => s.r = v,
    }
}

fn sum_points(points: impl Iterator<Item = f64>) -> f64 {
    points.fold(0.0, |acc, p| acc + p).clamp(0.0, 1.0)
}

/// Rule set plus vocabulary; immutable for the duration of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FairEngine {
    pub rules: RuleSet,
    pub vocabulary: Vocabulary,
}

impl FairEngine {
    pub fn new(rules: RuleSet, vocabulary: Vocabulary) -> Self {
        Self { rules, vocabulary }
    }

    /// Degree in `[0, 1]` to which `m` satisfies `predicate`.
    pub fn predicate_fraction(&self, predicate: Predicate, m: &ObjectMetadata) -> f64 {
        let t = &self.rules.thresholds;
        let holds = match predicate {
            Predicate::PersistentIdentifier => m.identifier_scheme.is_persistent(),
            Predicate::RichMetadata => {
                !m.title.trim().is_empty()
                    && m.description_chars >= t.description_chars
                    && m.keywords.len() >= t.keywords
            }
            Predicate::AccessUrl => m.access_url.as_deref().is_some_and(|u| !u.is_empty()),
            Predicate::OpenLicense => m
                .license_id
                .as_deref()
                .is_some_and(|l| self.vocabulary.open_licenses.contains(l)),
            Predicate::HttpsProtocol => m.access_protocol == AccessProtocol::Https,
            Predicate::StandardFormat => {
                m.formats.iter().any(|f| self.vocabulary.standard_formats.contains(f))
            }
            Predicate::StandardSchema => m.uses_standard_schema,
            Predicate::LicensePresent => m.license_id.as_deref().is_some_and(|l| !l.is_empty()),
            Predicate::Provenance => m.has_provenance,
            Predicate::Completeness => return m.completeness_ratio.clamp(0.0, 1.0),
        };
        if holds {
            1.0
        } else {
            0.0
        }
    }

    /// Computed score and fired rules for one dimension.
    pub fn evaluate(&self, dimension: Dimension, m: &ObjectMetadata) -> (f64, Vec<RuleHit>) {
        let hits: Vec<RuleHit> = self
            .rules
            .rules(dimension)
            .iter()
            .filter_map(|rule| {
                let fraction = self.predicate_fraction(rule.predicate, m);
                (fraction > 0.0).then(|| RuleHit {
                    dimension,
                    rule_id: rule.id.clone(),
                    points: rule.points * fraction,
                })
            })
            .collect();
        (sum_points(hits.iter().map(|h| h.points)), hits)
    }

    pub fn assess_findability(&self, m: &ObjectMetadata) -> f64 {
        self.evaluate(Dimension::F, m).0
    }

    pub fn assess_accessibility(&self, m: &ObjectMetadata) -> f64 {
        self.evaluate(Dimension::A, m).0
    }

    pub fn assess_interoperability(&self, m: &ObjectMetadata) -> f64 {
        self.evaluate(Dimension::I, m).0
    }

    pub fn assess_reusability(&self, m: &ObjectMetadata) -> f64 {
        self.evaluate(Dimension::R, m).0
    }

    /// Full assessment of object `object_id`, applying curator overrides.
    pub fn assess(
        &self,
        object_id: &str,
        m: &ObjectMetadata,
        overrides: &[CuratorOverride],
    ) -> Result<FairAssessment, FairError> {
        let mut computed = FairSubScores { f: 0.0, a: 0.0, i: 0.0, r: 0.0 };
        let mut rule_trace = Vec::new();
        for dimension in Dimension::ALL {
            let (score, hits) = self.evaluate(dimension, m);
            set_sub_score(&mut computed, dimension, score);
            rule_trace.extend(hits);
        }

        let mut sub_scores = computed;
        let mut provenance = DimensionProvenance {
            f: Provenance::Computed,
            a: Provenance::Computed,
            i: Provenance::Computed,
            r: Provenance::Computed,
        };
        let mut applied_overrides = Vec::new();
        for dimension in Dimension::ALL {
            if let Some(o) = latest_override(object_id, dimension, overrides)? {
                set_sub_score(&mut sub_scores, dimension, o.value);
                provenance.set(dimension, Provenance::Curated);
                applied_overrides.push(o.clone());
            }
        }

        Ok(FairAssessment { sub_scores, computed, provenance, rule_trace, applied_overrides })
    }
}

fn latest_override<'a>(
    object_id: &str,
    dimension: Dimension,
    overrides: &'a [CuratorOverride],
) -> Result<Option<&'a CuratorOverride>, FairError> {
    let mut latest: Option<&CuratorOverride> = None;
    for o in overrides {
        if o.object_id != object_id {
            return Err(FairError::ForeignOverride {
                expected: object_id.to_string(),
                found: o.object_id.clone(),
            });
        }
        o.validate()?;
        if o.dimension != dimension {
            continue;
        }
        match latest {
            Some(cur) if o.timestamp == cur.timestamp && o.value != cur.value => {
                return Err(FairError::AmbiguousOverride {
                    object_id: object_id.to_string(),
                    dimension,
                    timestamp: o.timestamp,
                });
            }
            Some(cur) if o.timestamp <= cur.timestamp => {}
            _ => latest = Some(o),
        }
    }
    Ok(latest)
}
