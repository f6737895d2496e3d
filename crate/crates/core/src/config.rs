//! Scoring configuration, loaded from TOML.
//!
//! ```toml
//! zero_reuse_policy = "annihilate"   # or "formula"
//! rules = "rules.toml"               # optional; relative to this file
//! open_licenses = ["CC0-1.0", "CC-BY-4.0"]
//! standard_formats = ["text/csv"]
//!
//! [fair_weights]
//! f = 0.25
//! a = 0.25
//! i = 0.25
//! r = 0.25
//!
//! [reuse_weights]
//! citation = 1.0
//! derived_dataset = 1.0
//! mention = 0.25
//! download_batch = 0.1
//! ```
//!
//! Every key is optional; omitted keys take the defaults shown by
//! [`Config::default`].

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fair::{FairEngine, FairError, RuleSet, Vocabulary};
use crate::ingest::ReuseKind;
use crate::metric::{FairWeights, ZeroReusePolicy};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Rules(#[from] FairError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub fair_weights: FairWeights,
    pub reuse_weights: BTreeMap<String, f64>,
    pub zero_reuse_policy: ZeroReusePolicy,
    pub rules: Option<PathBuf>,
    pub open_licenses: BTreeSet<String>,
    pub standard_formats: BTreeSet<String>,
}

impl Default for Config {
    fn default() -> Self {
        let vocabulary = Vocabulary::default();
        Self {
            fair_weights: FairWeights::default(),
            reuse_weights: ReuseKind::ALL.iter().map(|k| (k.as_str().to_string(), k.default_weight())).collect(),
            zero_reuse_policy: ZeroReusePolicy::default(),
            rules: None,
            open_licenses: vocabulary.open_licenses,
            standard_formats: vocabulary.standard_formats,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Parse a config file. A relative `rules` path is resolved against the
    /// config file's directory. The result is not validated.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::from_toml_str(&text)?;
        if let (Some(rules), Some(dir)) = (&config.rules, path.parent()) {
            if rules.is_relative() {
                config.rules = Some(dir.join(rules));
            }
        }
        Ok(config)
    }

    /// Every violated constraint, by name. Empty when the config is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.fair_weights.validate() {
            out.push(format!("fair_weights: {e}"));
        }
        for kind in ReuseKind::ALL {
            if !self.reuse_weights.contains_key(kind.as_str()) {
                out.push(format!("reuse_weights: missing weight for event kind {:?}", kind.as_str()));
            }
        }
        for (kind, w) in &self.reuse_weights {
            if !(w.is_finite() && *w >= 0.0) {
                out.push(format!("reuse_weights.{kind}: weight {w} must be finite and >= 0"));
            }
            if ReuseKind::parse(kind).is_none() {
                out.push(format!("reuse_weights.{kind}: unknown event kind"));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary { open_licenses: self.open_licenses.clone(), standard_formats: self.standard_formats.clone() }
    }

    /// Validate the config and build the FAIR engine it describes.
    pub fn fair_engine(&self) -> Result<FairEngine, ConfigError> {
        self.validate()?;
        let rules = match &self.rules {
            Some(path) => RuleSet::load(path)?,
            None => RuleSet::default(),
        };
        Ok(FairEngine::new(rules, self.vocabulary()))
    }
}
