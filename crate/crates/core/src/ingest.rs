//! JSONL record ingestion into the knowledge graph.
//!
//! Three record types arrive as UTF-8 JSONL, one record per line, each line
//! carrying a `schema` tag:
//!
//! | type            | schema                     |
//! |-----------------|----------------------------|
//! | data object     | `qic.data_object.v1`       |
//! | reuse event     | `qic.reuse_event.v1`       |
//! | curator override| `qic.curator_override.v1`  |
//!
//! Parsing never aborts on a bad line: each non-blank line becomes either a
//! validated record or a [`Rejection`] carrying its line number. Blank lines
//! are skipped. Applying records is idempotent; a replayed stream is reported
//! as entirely deduplicated and leaves the graph untouched. Within one stream
//! a reuse event for an object the graph has not seen yet is rejected, so
//! object files should be applied before event files.

use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::path::PathBuf;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::fair::{CuratorOverride, Dimension, ObjectMetadata};
use crate::graph::{validate_id, Edge, EdgeOutcome, KnowledgeGraph, Node, NodeKind, NodeOutcome};

pub const DATA_OBJECT_SCHEMA: &str = "qic.data_object.v1";
pub const REUSE_EVENT_SCHEMA: &str = "qic.reuse_event.v1";
pub const CURATOR_OVERRIDE_SCHEMA: &str = "qic.curator_override.v1";

const PERSONA_OBJECTS: &str = include_str!("../fixtures/persona/objects.jsonl");
const PERSONA_EVENTS: &str = include_str!("../fixtures/persona/events.jsonl");
const PERSONA_OVERRIDES: &str = include_str!("../fixtures/persona/overrides.jsonl");

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error reading {source_name}: {error}")]
    Io {
        source_name: String,
        #[source]
        error: std::io::Error,
    },
    #[error("{source_name} line {line}: not UTF-8 text")]
    MalformedContainer { source_name: String, line: usize },
    #[error("unknown source adapter {0:?}")]
    UnknownAdapter(String),
    #[error("adapter {adapter} failed: {message}")]
    Adapter { adapter: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordType {
    DataObject,
    ReuseEvent,
    CuratorOverride,
}

impl RecordType {
    pub fn schema(self) -> &'static str {
        match self {
            Self::DataObject => DATA_OBJECT_SCHEMA,
            Self::ReuseEvent => REUSE_EVENT_SCHEMA,
            Self::CuratorOverride => CURATOR_OVERRIDE_SCHEMA,
        }
    }

    fn required_fields(self) -> &'static [&'static str] {
        match self {
            Self::DataObject => &["id", "title", "repository", "published", "contributors"],
            Self::ReuseEvent => &["data_object_id", "kind", "source_id", "occurred"],
            Self::CuratorOverride => &["object_id", "dimension", "value", "curator_id", "timestamp"],
        }
    }
}

impl fmt::Display for RecordType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DataObject => "data_object",
            Self::ReuseEvent => "reuse_event",
            Self::CuratorOverride => "curator_override",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReuseKind {
    Citation,
    DerivedDataset,
    Mention,
    DownloadBatch,
}

impl ReuseKind {
    pub const ALL: [ReuseKind; 4] =
        [ReuseKind::Citation, ReuseKind::DerivedDataset, ReuseKind::Mention, ReuseKind::DownloadBatch];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Citation => "citation",
            Self::DerivedDataset => "derived_dataset",
            Self::Mention => "mention",
            Self::DownloadBatch => "download_batch",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn default_weight(self) -> f64 {
        match self {
            Self::Citation | Self::DerivedDataset => 1.0,
            Self::Mention => 0.25,
            Self::DownloadBatch => 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContributorRecord {
    pub researcher_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub institution_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataObjectRecord {
    pub schema: String,
    pub id: String,
    pub title: String,
    pub repository: String,
    pub published: NaiveDate,
    pub contributors: Vec<ContributorRecord>,
    #[serde(default)]
    pub metadata: ObjectMetadata,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReuseEventRecord {
    pub schema: String,
    pub data_object_id: String,
    pub kind: ReuseKind,
    pub source_id: String,
    pub occurred: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_override: Option<f64>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuratorOverrideRecord {
    pub schema: String,
    pub object_id: String,
    pub dimension: Dimension,
    pub value: f64,
    pub curator_id: String,
    pub timestamp: DateTime<Utc>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl CuratorOverrideRecord {
    pub fn to_override(&self) -> CuratorOverride {
        CuratorOverride {
            object_id: self.object_id.clone(),
            dimension: self.dimension,
            value: self.value,
            curator_id: self.curator_id.clone(),
            timestamp: self.timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    DataObject(DataObjectRecord),
    ReuseEvent(ReuseEventRecord),
    CuratorOverride(CuratorOverrideRecord),
}

/// A line that did not make it into the graph, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub record_type: RecordType,
    pub source: String,
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} ({})", self.source, self.line, self.reason, self.record_type)
    }
}

/// Parsed records of one stream, with the lines that failed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub record_type: RecordType,
    pub source: String,
    pub records: Vec<(usize, Record)>,
    pub rejections: Vec<Rejection>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub accepted: usize,
    pub deduplicated: usize,
    pub rejected: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.accepted + self.deduplicated + self.rejected
    }

    fn add(&mut self, other: Counts) {
        self.accepted += other.accepted;
        self.deduplicated += other.deduplicated;
        self.rejected += other.rejected;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub data_objects: Counts,
    pub reuse_events: Counts,
    pub curator_overrides: Counts,
    pub rejections: Vec<Rejection>,
}

impl IngestReport {
    pub fn counts(&self, t: RecordType) -> Counts {
        match t {
            RecordType::DataObject => self.data_objects,
            RecordType::ReuseEvent => self.reuse_events,
            RecordType::CuratorOverride => self.curator_overrides,
        }
    }

    fn counts_mut(&mut self, t: RecordType) -> &mut Counts {
        match t {
            RecordType::DataObject => &mut self.data_objects,
            RecordType::ReuseEvent => &mut self.reuse_events,
            RecordType::CuratorOverride => &mut self.curator_overrides,
        }
    }

    pub fn accepted(&self) -> usize {
        self.data_objects.accepted + self.reuse_events.accepted + self.curator_overrides.accepted
    }

    pub fn deduplicated(&self) -> usize {
        self.data_objects.deduplicated + self.reuse_events.deduplicated + self.curator_overrides.deduplicated
    }

    pub fn rejected(&self) -> usize {
        self.data_objects.rejected + self.reuse_events.rejected + self.curator_overrides.rejected
    }

    pub fn merge(&mut self, other: IngestReport) {
        self.data_objects.add(other.data_objects);
        self.reuse_events.add(other.reuse_events);
        self.curator_overrides.add(other.curator_overrides);
        self.rejections.extend(other.rejections);
    }
}

/// Parse a JSONL stream of `record_type` records. `source` labels rejections.
pub fn parse_records<R: BufRead>(
    mut reader: R,
    record_type: RecordType,
    source: &str,
) -> Result<Batch, IngestError> {
    let mut batch = Batch { record_type, source: source.to_string(), records: Vec::new(), rejections: Vec::new() };
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|error| IngestError::Io { source_name: source.to_string(), error })?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let text = std::str::from_utf8(&buf)
            .map_err(|_| IngestError::MalformedContainer { source_name: source.to_string(), line: line_no })?;
        let text = text.trim();
        if text.is_empty() {
            continue;
        }
        match parse_line(text, record_type) {
            Ok(record) => batch.records.push((line_no, record)),
            Err(reason) => batch.rejections.push(Rejection {
                record_type,
                source: source.to_string(),
                line: line_no,
                reason,
            }),
        }
    }
    Ok(batch)
}

pub fn parse_str(text: &str, record_type: RecordType, source: &str) -> Result<Batch, IngestError> {
    parse_records(text.as_bytes(), record_type, source)
}

/// Validate one line into a record, or explain why not.
pub fn parse_line(text: &str, record_type: RecordType) -> Result<Record, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let Value::Object(map) = &value else {
        return Err("record is not a JSON object".into());
    };
    match map.get("schema").and_then(Value::as_str) {
        None => return Err("missing schema".into()),
        Some(s) if s != record_type.schema() => {
            return Err(format!("schema {s:?} does not match expected {:?}", record_type.schema()))
        }
        Some(_) => {}
    }
    for field in record_type.required_fields() {
        if map.get(*field).map_or(true, Value::is_null) {
            return Err(format!("missing {field}"));
        }
    }
    let invalid = |e: serde_json::Error| format!("invalid record: {e}");
    match record_type {
        RecordType::DataObject => {
            let mut r: DataObjectRecord = serde_json::from_value(value).map_err(invalid)?;
            validate_object(&mut r)?;
            Ok(Record::DataObject(r))
        }
        RecordType::ReuseEvent => {
            let r: ReuseEventRecord = serde_json::from_value(value).map_err(invalid)?;
            validate_id(&r.data_object_id).map_err(|e| e.to_string())?;
            validate_id(&r.source_id).map_err(|e| e.to_string())?;
            if let Some(w) = r.weight_override {
                if !(w.is_finite() && w >= 0.0) {
                    return Err(format!("weight_override {w} must be finite and >= 0"));
                }
            }
            Ok(Record::ReuseEvent(r))
        }
        RecordType::CuratorOverride => {
            let r: CuratorOverrideRecord = serde_json::from_value(value).map_err(invalid)?;
            validate_id(&r.object_id).map_err(|e| e.to_string())?;
            if r.curator_id.trim().is_empty() {
                return Err("missing curator_id".into());
            }
            if !(0.0..=1.0).contains(&r.value) {
                return Err(format!("override value {} outside [0, 1]", r.value));
            }
            Ok(Record::CuratorOverride(r))
        }
    }
}

fn validate_object(r: &mut DataObjectRecord) -> Result<(), String> {
    validate_id(&r.id).map_err(|e| e.to_string())?;
    if r.contributors.is_empty() {
        return Err("missing contributors".into());
    }
    for c in &r.contributors {
        validate_id(&c.researcher_id).map_err(|e| format!("contributor: {e}"))?;
        if let Some(inst) = &c.institution_id {
            validate_id(inst).map_err(|e| format!("contributor institution: {e}"))?;
        }
    }
    r.metadata.validate()?;
    if r.metadata.title.is_empty() {
        r.metadata.title = r.title.clone();
    }
    Ok(())
}

enum Outcome {
    Accepted,
    Deduplicated,
}

/// Apply a parsed batch to the graph, in stream order.
pub fn apply(batch: &Batch, graph: &mut KnowledgeGraph) -> IngestReport {
    let mut report = IngestReport::default();
    for rej in &batch.rejections {
        report.counts_mut(rej.record_type).rejected += 1;
        report.rejections.push(rej.clone());
    }
    for (line, record) in &batch.records {
        let (record_type, result) = match record {
            Record::DataObject(r) => (RecordType::DataObject, apply_object(r, graph)),
            Record::ReuseEvent(r) => (RecordType::ReuseEvent, apply_event(r, graph)),
            Record::CuratorOverride(r) => (RecordType::CuratorOverride, apply_override(r, graph)),
        };
        let counts = report.counts_mut(record_type);
        match result {
            Ok(Outcome::Accepted) => counts.accepted += 1,
            Ok(Outcome::Deduplicated) => counts.deduplicated += 1,
            Err(reason) => {
                counts.rejected += 1;
                report.rejections.push(Rejection {
                    record_type,
                    source: batch.source.clone(),
                    line: *line,
                    reason,
                });
            }
        }
    }
    report.rejections.sort_by(|a, b| (&a.source, a.line).cmp(&(&b.source, b.line)));
    report
}

fn object_nodes(r: &DataObjectRecord) -> Vec<Node> {
    let mut object = Node::new(&r.id, NodeKind::DataObject)
        .with_attr("title", r.title.clone())
        .with_attr("repository", r.repository.clone())
        .with_attr("published", r.published.to_string())
        .with_attr("metadata", serde_json::to_value(&r.metadata).expect("metadata serializes"));
    if !r.extra.is_empty() {
        object = object.with_attr("extra", Value::Object(r.extra.clone().into_iter().collect()));
    }
    let mut nodes = vec![object];
    for c in &r.contributors {
        let mut researcher = Node::new(&c.researcher_id, NodeKind::Researcher);
        if let Some(name) = &c.name {
            researcher = researcher.with_attr("name", name.clone());
        }
        nodes.push(researcher);
        if let Some(inst) = &c.institution_id {
            nodes.push(Node::new(inst, NodeKind::Institution));
        }
    }
    nodes
}

fn apply_object(r: &DataObjectRecord, graph: &mut KnowledgeGraph) -> Result<Outcome, String> {
    let nodes = object_nodes(r);
    // All-or-nothing: check every node before mutating.
    for n in &nodes {
        graph.check_node(n).map_err(|e| e.to_string())?;
    }
    let mut changed = false;
    for n in nodes {
        changed |= graph.upsert_node(n).map_err(|e| e.to_string())? != NodeOutcome::Unchanged;
    }
    for c in &r.contributors {
        let mut edges = vec![Edge::contribution(&c.researcher_id, &r.id)];
        if let Some(inst) = &c.institution_id {
            edges.push(Edge::affiliation(&c.researcher_id, inst, &r.id));
        }
        for e in edges {
            changed |= graph.add_edge(e).map_err(|e| e.to_string())? == EdgeOutcome::Acknowledged;
        }
    }
    Ok(if changed { Outcome::Accepted } else { Outcome::Deduplicated })
}

fn apply_event(r: &ReuseEventRecord, graph: &mut KnowledgeGraph) -> Result<Outcome, String> {
    match graph.node(&r.data_object_id) {
        Some(n) if n.kind == NodeKind::DataObject => {}
        Some(n) => return Err(format!("{} is a {}, not a data object", n.id, n.kind)),
        None => return Err(format!("unknown data object {}", r.data_object_id)),
    }
    let source = Node::new(&r.source_id, NodeKind::ReuseSource);
    graph.check_node(&source).map_err(|e| e.to_string())?;
    let edge = Edge::reuse(&r.data_object_id, &r.source_id, r.kind.as_str(), r.occurred, r.weight_override);
    let created = graph.node(&r.source_id).is_none();
    if created {
        graph.upsert_node(source).map_err(|e| e.to_string())?;
    }
    match graph.add_edge(edge) {
        Ok(EdgeOutcome::Acknowledged) => Ok(Outcome::Accepted),
        Ok(EdgeOutcome::Deduplicated) => Ok(Outcome::Deduplicated),
        Err(e) => Err(e.to_string()),
    }
}

fn apply_override(r: &CuratorOverrideRecord, graph: &mut KnowledgeGraph) -> Result<Outcome, String> {
    match graph.add_override(r.to_override()) {
        Ok(EdgeOutcome::Acknowledged) => Ok(Outcome::Accepted),
        Ok(EdgeOutcome::Deduplicated) => Ok(Outcome::Deduplicated),
        Err(e) => Err(e.to_string()),
    }
}

/// Raw JSONL streams produced by a source adapter, one per record type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceStreams {
    pub label: String,
    pub objects: String,
    pub events: String,
    pub overrides: String,
}

impl SourceStreams {
    /// Parse and apply objects, then overrides, then events.
    pub fn ingest(&self, graph: &mut KnowledgeGraph) -> Result<IngestReport, IngestError> {
        let mut report = IngestReport::default();
        for (text, t, name) in [
            (&self.objects, RecordType::DataObject, "objects.jsonl"),
            (&self.overrides, RecordType::CuratorOverride, "overrides.jsonl"),
            (&self.events, RecordType::ReuseEvent, "events.jsonl"),
        ] {
            let batch = parse_str(text, t, &format!("{}/{name}", self.label))?;
            report.merge(apply(&batch, graph));
        }
        Ok(report)
    }
}

pub type AdapterConfig = BTreeMap<String, String>;

/// A source of canonical records: a repository API, a usage-statistics
/// service, or bundled files.
pub trait SourceAdapter: Send + Sync {
    fn name(&self) -> &str;
    fn fetch(&self, config: &AdapterConfig) -> Result<SourceStreams, IngestError>;
}

/// Replays JSONL files from `dir` (`objects.jsonl`, `events.jsonl`,
/// `overrides.jsonl`; missing files are empty), or the bundled persona
/// fixtures when no `dir` is given.
#[derive(Debug, Default)]
pub struct FixtureAdapter;

impl SourceAdapter for FixtureAdapter {
    fn name(&self) -> &str {
        "fixture"
    }

    fn fetch(&self, config: &AdapterConfig) -> Result<SourceStreams, IngestError> {
        let Some(dir) = config.get("dir") else {
            return Ok(persona_fixture());
        };
        let dir = PathBuf::from(dir);
        if !dir.is_dir() {
            return Err(IngestError::Adapter {
                adapter: self.name().into(),
                message: format!("{} is not a directory", dir.display()),
            });
        }
        let read = |name: &str| -> Result<String, IngestError> {
            let path = dir.join(name);
            match std::fs::read(&path) {
                Ok(bytes) => String::from_utf8(bytes).map_err(|_| IngestError::MalformedContainer {
                    source_name: path.display().to_string(),
                    line: 0,
                }),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
                Err(e) => Err(IngestError::Adapter { adapter: "fixture".into(), message: format!("{}: {e}", path.display()) }),
            }
        };
        Ok(SourceStreams {
            label: dir.display().to_string(),
            objects: read("objects.jsonl")?,
            events: read("events.jsonl")?,
            overrides: read("overrides.jsonl")?,
        })
    }
}

/// Placeholder for a live network source. Always reports a transport failure;
/// offline builds ingest through [`FixtureAdapter`] instead.
#[derive(Debug)]
pub struct OfflineStub {
    name: &'static str,
}

impl SourceAdapter for OfflineStub {
    fn name(&self) -> &str {
        self.name
    }

    fn fetch(&self, _config: &AdapterConfig) -> Result<SourceStreams, IngestError> {
        Err(IngestError::Adapter {
            adapter: self.name.into(),
            message: "live harvesting is not available in this build".into(),
        })
    }
}

pub struct AdapterRegistry {
    adapters: BTreeMap<String, Box<dyn SourceAdapter>>,
}

impl AdapterRegistry {
    pub fn empty() -> Self {
        Self { adapters: BTreeMap::new() }
    }

    pub fn register(&mut self, adapter: Box<dyn SourceAdapter>) {
        self.adapters.insert(adapter.name().to_string(), adapter);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.adapters.keys().map(String::as_str)
    }

    pub fn fetch(&self, name: &str, config: &AdapterConfig) -> Result<SourceStreams, IngestError> {
        self.adapters
            .get(name)
            .ok_or_else(|| IngestError::UnknownAdapter(name.to_string()))?
            .fetch(config)
    }
}

impl Default for AdapterRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FixtureAdapter));
        r.register(Box::new(OfflineStub { name: "datacite" }));
        r.register(Box::new(OfflineStub { name: "usage-stats" }));
        r
    }
}

pub fn fetch_from_source(adapter_name: &str, config: &AdapterConfig) -> Result<SourceStreams, IngestError> {
    AdapterRegistry::default().fetch(adapter_name, config)
}

/// The bundled persona scenario.
pub fn persona_fixture() -> SourceStreams {
    SourceStreams {
        label: "persona".into(),
        objects: PERSONA_OBJECTS.into(),
        events: PERSONA_EVENTS.into(),
        overrides: PERSONA_OVERRIDES.into(),
    }
}
