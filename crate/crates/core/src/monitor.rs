//! Full recomputation of object and researcher scores from the graph.
//!
//! [`recompute`] is the reference path: it scores every data object in id
//! order and then sums per researcher. Floating-point sums use a fixed
//! order so reports are bit-reproducible:
//!
//! * FAIR points: rule-file order, starting from `0.0`;
//! * quality: `w_f*q_f + w_a*q_a + w_i*q_i + w_r*q_r`, left to right;
//! * reuse weight: events by (date, source id, event kind), starting from `0.0`;
//! * researcher total: contributions by object id, starting from `0.0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::fair::{DimensionProvenance, FairAssessment, FairError, ObjectMetadata};
use crate::graph::{event_weight, GraphError, KnowledgeGraph, NodeKind, ReuseEvent};
use crate::metric::{
    collaboration_score, impact_score, object_score, quality_score, researcher_index, total_reuse_weight,
    CollaborationCounts, FairWeights, MetricError, ObjectScore, ReuseWeight, ZeroReusePolicy,
};

#[derive(Debug, Error)]
pub enum MonitorError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fair(#[from] FairError),
    #[error("scoring {object}: {source}")]
    Metric {
        object: String,
        #[source]
        source: MetricError,
    },
    #[error("graph integrity: {0}")]
    Integrity(String),
    #[error("object {0} is not in the report")]
    UnknownObject(String),
    #[error("researcher {0} is not in the report")]
    UnknownResearcher(String),
    #[error("snapshot dates must be strictly increasing ({0} follows {1})")]
    UnorderedDates(NaiveDate, NaiveDate),
}

pub type Result<T> = std::result::Result<T, MonitorError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRow {
    pub object_id: String,
    pub q: f64,
    pub i: f64,
    pub c: f64,
    pub s: f64,
    pub provenance: DimensionProvenance,
    /// Number of reuse events counted (M).
    pub reuse_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResearcherRow {
    pub researcher_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub s_total: f64,
    pub contributions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedReuse {
    #[serde(flatten)]
    pub event: ReuseEvent,
    pub weight: f64,
}

/// Everything needed to recompute one object's score by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub object_id: String,
    pub score: ObjectScore,
    pub fair_weights: FairWeights,
    pub fair: FairAssessment,
    pub reuse: Vec<WeightedReuse>,
    pub total_reuse_weight: f64,
    pub zero_reuse_policy: ZeroReusePolicy,
    pub impact_note: String,
    pub counts: CollaborationCounts,
    pub contributors: Vec<String>,
    pub institutions: Vec<String>,
}

impl Explanation {
    pub fn reuse_weights(&self) -> Vec<ReuseWeight> {
        self.reuse.iter().map(|r| ReuseWeight::new(r.weight).expect("weights were validated")).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub as_of: Option<NaiveDate>,
    pub zero_reuse_policy: ZeroReusePolicy,
    /// Sorted by object id.
    pub objects: Vec<ObjectRow>,
    /// Sorted by researcher id; includes researchers with zero score.
    pub researchers: Vec<ResearcherRow>,
    explanations: BTreeMap<String, Explanation>,
}

impl ScoreReport {
    pub fn object(&self, id: &str) -> Option<&ObjectRow> {
        self.objects.binary_search_by(|r| r.object_id.as_str().cmp(id)).ok().map(|i| &self.objects[i])
    }

    pub fn researcher(&self, id: &str) -> Option<&ResearcherRow> {
        self.researchers.binary_search_by(|r| r.researcher_id.as_str().cmp(id)).ok().map(|i| &self.researchers[i])
    }

    /// Object scores credited to a researcher, by object id.
    pub fn contributions_of(&self, graph: &KnowledgeGraph, researcher_id: &str) -> Result<Vec<ObjectRow>> {
        if self.researcher(researcher_id).is_none() {
            return Err(MonitorError::UnknownResearcher(researcher_id.to_string()));
        }
        Ok(graph
            .contributions_of(researcher_id)?
            .iter()
            .filter_map(|id| self.object(id).cloned())
            .collect())
    }

    /// Object rows then researcher rows, one JSON document per line.
    pub fn to_jsonl(&self) -> String {
        let as_of = self.as_of.map(|d| d.to_string());
        let mut out = String::new();
        for row in &self.objects {
            let mut v = serde_json::to_value(row).expect("rows serialize");
            tag_row(&mut v, "object", &as_of);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for row in &self.researchers {
            let mut v = serde_json::to_value(row).expect("rows serialize");
            tag_row(&mut v, "researcher", &as_of);
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    /// Human-readable aligned tables.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let as_of = self.as_of.map_or_else(|| "latest".to_string(), |d| d.to_string());
        let _ = writeln!(out, "as of {as_of} (zero reuse policy: {})", self.zero_reuse_policy);
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .objects
            .iter()
            .map(|r| {
                vec![
                    r.object_id.clone(),
                    fmt_num(r.q),
                    fmt_num(r.i),
                    fmt_num(r.c),
                    fmt_num(r.s),
                    r.reuse_events.to_string(),
                    curated_flags(&r.provenance),
                ]
            })
            .collect();
        out.push_str(&render_table(&["object", "q", "i", "c", "s", "M", "curated"], &rows));
        out.push('\n');
        let rows: Vec<Vec<String>> = self
            .researchers
            .iter()
            .map(|r| {
                vec![
                    r.researcher_id.clone(),
                    r.name.clone().unwrap_or_default(),
                    fmt_num(r.s_total),
                    r.contributions.to_string(),
                ]
            })
            .collect();
        out.push_str(&render_table(&["researcher", "name", "S", "objects"], &rows));
        out
    }

    /// SHA-256 of the JSONL rendering.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_jsonl().as_bytes()))
    }
}

fn tag_row(v: &mut Value, kind: &str, as_of: &Option<String>) {
    if let Value::Object(map) = v {
        map.insert("row".into(), Value::from(kind));
        map.insert("as_of".into(), as_of.clone().map_or(Value::Null, Value::from));
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.6}")
}

pub fn curated_flags(p: &DimensionProvenance) -> String {
    let curated: String = p.curated().iter().map(ToString::to_string).collect();
    if curated.is_empty() {
        "-".into()
    } else {
        curated
    }
}

/// Left-align text columns, right-align columns whose cells all parse as numbers.
pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    let mut numeric = vec![true; cols];
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.chars().count());
            numeric[c] &= cell.parse::<f64>().is_ok();
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(c, s)| if numeric[c] { format!("{s:>w$}", w = widths[c]) } else { format!("{s:<w$}", w = widths[c]) })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(headers.to_vec());
    line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

fn object_metadata(graph: &KnowledgeGraph, id: &str) -> Result<ObjectMetadata> {
    let node = graph.node(id).ok_or_else(|| MonitorError::UnknownObject(id.to_string()))?;
    match node.attributes.get("metadata") {
        None => Ok(ObjectMetadata::default()),
        Some(v) => {
            let m: ObjectMetadata = serde_json::from_value(v.clone())
                .map_err(|e| MonitorError::Integrity(format!("metadata of {id}: {e}")))?;
            m.validate().map_err(|e| MonitorError::Integrity(format!("metadata of {id}: {e}")))?;
            Ok(m)
        }
    }
}

fn score_object(
    graph: &KnowledgeGraph,
    config: &Config,
    engine: &crate::fair::FairEngine,
    id: &str,
    as_of: Option<NaiveDate>,
) -> Result<Explanation> {
    let metric = |source| MonitorError::Metric { object: id.to_string(), source };
    let metadata = object_metadata(graph, id)?;
    let fair = engine.assess(id, &metadata, graph.overrides_for(id))?;
    let q = quality_score(&fair.sub_scores, &config.fair_weights).map_err(metric)?;

    let events = graph.reuse_events(id, as_of)?;
    let mut reuse = Vec::with_capacity(events.len());
    let mut weights = Vec::with_capacity(events.len());
    for event in events {
        let w = event_weight(id, &event, &config.reuse_weights)?;
        weights.push(w);
        reuse.push(WeightedReuse { event, weight: w.value() });
    }
    let total = total_reuse_weight(&weights);
    let i = impact_score(&weights, config.zero_reuse_policy).map_err(metric)?;
    let impact_note = match (total == 0.0, config.zero_reuse_policy) {
        (true, ZeroReusePolicy::Annihilate) => {
            "no reuse recorded: I = 0 under zero_reuse_policy = annihilate".to_string()
        }
        (true, ZeroReusePolicy::Formula) => {
            "no reuse recorded: I = 1 + ln(1 + 0) = 1 under zero_reuse_policy = formula".to_string()
        }
        (false, _) => format!("I = 1 + ln(1 + {total}) over {} reuse event(s)", reuse.len()),
    };

    let counts = graph.collaboration_counts(id).map_err(|e| match e {
        GraphError::NoContributors(o) => MonitorError::Integrity(format!("data object {o} has no contributors")),
        other => other.into(),
    })?;
    let c = collaboration_score(counts).map_err(metric)?;
    let score = object_score(q, i, c).map_err(metric)?;

    Ok(Explanation {
        object_id: id.to_string(),
        score,
        fair_weights: config.fair_weights,
        fair,
        reuse,
        total_reuse_weight: total,
        zero_reuse_policy: config.zero_reuse_policy,
        impact_note,
        counts,
        contributors: graph.contributors_of(id)?,
        institutions: graph.institutions_of(id)?,
    })
}

/// Score every object and researcher in the graph as of `as_of`.
pub fn recompute(graph: &KnowledgeGraph, config: &Config, as_of: Option<NaiveDate>) -> Result<ScoreReport> {
    let engine = config.fair_engine()?;

    let mut explanations = BTreeMap::new();
    let mut objects = Vec::new();
    for node in graph.nodes_of_kind(NodeKind::DataObject) {
        let ex = score_object(graph, config, &engine, &node.id, as_of)?;
        objects.push(ObjectRow {
            object_id: ex.object_id.clone(),
            q: ex.score.q,
            i: ex.score.i,
            c: ex.score.c,
            s: ex.score.s,
            provenance: ex.fair.provenance,
            reuse_events: ex.reuse.len(),
        });
        explanations.insert(node.id.clone(), ex);
    }

    let mut researchers = Vec::new();
    for node in graph.nodes_of_kind(NodeKind::Researcher) {
        let contributions: Vec<(String, ObjectScore)> = graph
            .contributions_of(&node.id)?
            .into_iter()
            .map(|oid| {
                let score = explanations[&oid].score;
                (oid, score)
            })
            .collect();
        let count = contributions.len();
        let index = researcher_index(&node.id, contributions)
            .map_err(|source| MonitorError::Metric { object: node.id.clone(), source })?;
        researchers.push(ResearcherRow {
            researcher_id: node.id.clone(),
            name: node.attributes.get("name").and_then(Value::as_str).map(str::to_string),
            s_total: index.s_total,
            contributions: count,
        });
    }

    Ok(ScoreReport { as_of, zero_reuse_policy: config.zero_reuse_policy, objects, researchers, explanations })
}

/// Researchers by descending total, ties broken by ascending id.
pub fn rank(report: &ScoreReport, top_n: usize) -> Vec<ResearcherRow> {
    let mut rows = report.researchers.clone();
    rows.sort_by(|a, b| b.s_total.total_cmp(&a.s_total).then_with(|| a.researcher_id.cmp(&b.researcher_id)));
    rows.truncate(top_n);
    rows
}

pub fn explain<'a>(report: &'a ScoreReport, object_id: &str) -> Result<&'a Explanation> {
    report.explanations.get(object_id).ok_or_else(|| MonitorError::UnknownObject(object_id.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotEntry {
    pub as_of: NaiveDate,
    pub digest: String,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SnapshotSeries {
    pub entries: Vec<SnapshotEntry>,
}

impl SnapshotSeries {
    pub fn digests(&self) -> Vec<(NaiveDate, String)> {
        self.entries.iter().map(|e| (e.as_of, e.digest.clone())).collect()
    }
}

/// One full recompute per date. Dates must be strictly increasing.
pub fn snapshot(graph: &KnowledgeGraph, config: &Config, dates: &[NaiveDate]) -> Result<SnapshotSeries> {
    for pair in dates.windows(2) {
        if pair[1] <= pair[0] {
            return Err(MonitorError::UnorderedDates(pair[1], pair[0]));
        }
    }
    let entries = dates
        .iter()
        .map(|&d| {
            let report = recompute(graph, config, Some(d))?;
            Ok(SnapshotEntry { as_of: d, digest: report.digest(), report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SnapshotSeries { entries })
}
