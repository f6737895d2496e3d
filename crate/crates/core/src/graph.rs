//! In-memory scholarly knowledge graph with single-file persistence.
//!
//! Nodes are researchers, institutions, data objects and reuse sources, keyed
//! by namespaced identifiers (`orcid:...`, `ror:...`, `doi:...`). Edges are
//! contributions (researcher → object), affiliations (researcher →
//! institution, scoped to one object) and reuses (object → reuse source).
//! Curator overrides for FAIR sub-scores are stored alongside, keyed by
//! object.
//!
//! All collections are ordered maps, so every query and the saved file have
//! a stable order. Edges are deduplicated on their key; see [`EdgeKey`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fair::CuratorOverride;
use crate::metric::{CollaborationCounts, ReuseWeight};

pub const SCHEMA_VERSION: u32 = 1;
const FILE_FORMAT: &str = "qic-graph";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid identifier {0:?}: expected <namespace>:<value>")]
    InvalidId(String),
    #[error("node {id} already exists as {existing}, cannot use it as {requested}")]
    KindConflict { id: String, existing: NodeKind, requested: NodeKind },
    #[error("edge endpoint {0} does not exist")]
    MissingEndpoint(String),
    #[error("edge constraint violated: {0}")]
    KindConstraint(String),
    #[error("unknown researcher {0}")]
    UnknownResearcher(String),
    #[error("unknown data object {0}")]
    UnknownObject(String),
    #[error("data object {0} has no contributors")]
    NoContributors(String),
    #[error("no weight configured for reuse event kind {0:?}")]
    UnmappedEventKind(String),
    #[error("invalid reuse weight on {object} from {source_id}: {value}")]
    InvalidWeight { object: String, source_id: String, value: f64 },
    #[error("invalid curator override: {0}")]
    InvalidOverride(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("graph file schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("graph file integrity check failed: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, GraphError>;

pub type Attributes = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Researcher,
    Institution,
    DataObject,
    ReuseSource,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Researcher => "researcher",
            NodeKind::Institution => "institution",
            NodeKind::DataObject => "data_object",
            NodeKind::ReuseSource => "reuse_source",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: Attributes,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind) -> Self {
        Self { id: id.into(), kind, attributes: Attributes::new() }
    }

    pub fn with_attr(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.attributes.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    ContributedTo,
    AffiliatedWith,
    ReusedBy,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::ContributedTo => "contributed_to",
            EdgeKind::AffiliatedWith => "affiliated_with",
            EdgeKind::ReusedBy => "reused_by",
        })
    }
}

/// A typed edge. Which optional fields are set depends on `kind`:
/// affiliations carry the object they are scoped to, reuses carry the event
/// kind, date and an optional per-event weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub occurred: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl Edge {
    pub fn contribution(researcher: impl Into<String>, object: impl Into<String>) -> Self {
        Self {
            src: researcher.into(),
            dst: object.into(),
            kind: EdgeKind::ContributedTo,
            object: None,
            event_kind: None,
            occurred: None,
            weight: None,
        }
    }

    pub fn affiliation(
        researcher: impl Into<String>,
        institution: impl Into<String>,
        object: impl Into<String>,
    ) -> Self {
        Self {
            src: researcher.into(),
            dst: institution.into(),
            kind: EdgeKind::AffiliatedWith,
            object: Some(object.into()),
            event_kind: None,
            occurred: None,
            weight: None,
        }
    }

    pub fn reuse(
        object: impl Into<String>,
        source: impl Into<String>,
        event_kind: impl Into<String>,
        occurred: NaiveDate,
        weight: Option<f64>,
    ) -> Self {
        Self {
            src: object.into(),
            dst: source.into(),
            kind: EdgeKind::ReusedBy,
            object: None,
            event_kind: Some(event_kind.into()),
            occurred: Some(occurred),
            weight,
        }
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            kind: self.kind,
            src: self.src.clone(),
            dst: self.dst.clone(),
            occurred: self.occurred,
            event_kind: self.event_kind.clone().unwrap_or_default(),
            object: self.object.clone().unwrap_or_default(),
        }
    }
}

/// Identity of an edge. Two edges with equal keys are the same fact; for
/// reuses the key is (object, source, event kind, date), so a repeated report
/// with a different weight is still a duplicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub kind: EdgeKind,
    pub src: String,
    pub dst: String,
    pub occurred: Option<NaiveDate>,
    pub event_kind: String,
    pub object: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOutcome {
    Created,
    Updated,
    Unchanged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOutcome {
    Acknowledged,
    Deduplicated,
}

/// One reuse event of an object, as stored on its `reused_by` edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReuseEvent {
    pub source_id: String,
    pub event_kind: String,
    pub occurred: NaiveDate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_override: Option<f64>,
}

/// Point-in-time view of the graph: reuse edges after `as_of` are dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSnapshot {
    pub schema_version: u32,
    pub as_of: Option<NaiveDate>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

pub fn validate_id(id: &str) -> Result<()> {
    let Some((ns, rest)) = id.split_once(':') else {
        return Err(GraphError::InvalidId(id.to_string()));
    };
    let ns_ok = !ns.is_empty()
        && ns.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'));
    let rest_ok = !rest.is_empty() && !rest.chars().any(|c| c.is_whitespace() || c.is_control());
    if ns_ok && rest_ok {
        Ok(())
    } else {
        Err(GraphError::InvalidId(id.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeGraph {
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<EdgeKey, Edge>,
    outgoing: BTreeMap<String, BTreeSet<EdgeKey>>,
    incoming: BTreeMap<String, BTreeSet<EdgeKey>>,
    overrides: BTreeMap<String, Vec<CuratorOverride>>,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn override_count(&self) -> usize {
        self.overrides.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.values().filter(move |n| n.kind == kind)
    }

    /// Create `node`, or merge its attributes into an existing node of the same
    /// kind. Keys present in `node` overwrite existing values.
    pub fn upsert_node(&mut self, node: Node) -> Result<NodeOutcome> {
        validate_id(&node.id)?;
        match self.nodes.get_mut(&node.id) {
            None => {
                self.nodes.insert(node.id.clone(), node);
                Ok(NodeOutcome::Created)
            }
            Some(existing) if existing.kind != node.kind => Err(GraphError::KindConflict {
                id: node.id,
                existing: existing.kind,
                requested: node.kind,
            }),
            Some(existing) => {
                let mut changed = false;
                for (k, v) in node.attributes {
                    if existing.attributes.get(&k) != Some(&v) {
                        existing.attributes.insert(k, v);
                        changed = true;
                    }
                }
                Ok(if changed { NodeOutcome::Updated } else { NodeOutcome::Unchanged })
            }
        }
    }

    /// Check `upsert_node(node)` would succeed, without mutating.
    pub fn check_node(&self, node: &Node) -> Result<()> {
        validate_id(&node.id)?;
        match self.nodes.get(&node.id) {
            Some(existing) if existing.kind != node.kind => Err(GraphError::KindConflict {
                id: node.id.clone(),
                existing: existing.kind,
                requested: node.kind,
            }),
            _ => Ok(()),
        }
    }

    fn kind_of(&self, id: &str) -> Result<NodeKind> {
        self.nodes
            .get(id)
            .map(|n| n.kind)
            .ok_or_else(|| GraphError::MissingEndpoint(id.to_string()))
    }

    /// Check endpoint existence and the kind constraints of `edge`.
    pub fn check_edge(&self, edge: &Edge) -> Result<()> {
        let src = self.kind_of(&edge.src)?;
        let dst = self.kind_of(&edge.dst)?;
        let (want_src, want_dst) = match edge.kind {
            EdgeKind::ContributedTo => (NodeKind::Researcher, NodeKind::DataObject),
            EdgeKind::AffiliatedWith => (NodeKind::Researcher, NodeKind::Institution),
            EdgeKind::ReusedBy => (NodeKind::DataObject, NodeKind::ReuseSource),
        };
        if src != want_src || dst != want_dst {
            return Err(GraphError::KindConstraint(format!(
                "{} must link {want_src} -> {want_dst}, got {} ({src}) -> {} ({dst})",
                edge.kind, edge.src, edge.dst
            )));
        }
        match edge.kind {
            EdgeKind::ContributedTo => {
                if edge.object.is_some() || edge.event_kind.is_some() || edge.occurred.is_some() || edge.weight.is_some()
                {
                    return Err(GraphError::KindConstraint("contributed_to edges carry no attributes".into()));
                }
            }
            EdgeKind::AffiliatedWith => {
                let Some(object) = edge.object.as_deref() else {
                    return Err(GraphError::KindConstraint(
                        "affiliated_with edges must name the object they are scoped to".into(),
                    ));
                };
                if self.kind_of(object)? != NodeKind::DataObject {
                    return Err(GraphError::KindConstraint(format!(
                        "affiliation scope {object} is not a data object"
                    )));
                }
                if edge.event_kind.is_some() || edge.occurred.is_some() || edge.weight.is_some() {
                    return Err(GraphError::KindConstraint("affiliated_with edges carry no reuse attributes".into()));
                }
            }
            EdgeKind::ReusedBy => {
                if edge.event_kind.as_deref().map_or(true, str::is_empty) || edge.occurred.is_none() {
                    return Err(GraphError::KindConstraint(
                        "reused_by edges need an event kind and an occurrence date".into(),
                    ));
                }
                if edge.object.is_some() {
                    return Err(GraphError::KindConstraint("reused_by edges are not scoped".into()));
                }
                if let Some(w) = edge.weight {
                    if !(w.is_finite() && w >= 0.0) {
                        return Err(GraphError::InvalidWeight {
                            object: edge.src.clone(),
                            source_id: edge.dst.clone(),
                            value: w,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn add_edge(&mut self, edge: Edge) -> Result<EdgeOutcome> {
        self.check_edge(&edge)?;
        let key = edge.key();
        if self.edges.contains_key(&key) {
            return Ok(EdgeOutcome::Deduplicated);
        }
        self.outgoing.entry(edge.src.clone()).or_default().insert(key.clone());
        self.incoming.entry(edge.dst.clone()).or_default().insert(key.clone());
        self.edges.insert(key, edge);
        Ok(EdgeOutcome::Acknowledged)
    }

    /// Record a curator override. Identical repeats are deduplicated.
    pub fn add_override(&mut self, o: CuratorOverride) -> Result<EdgeOutcome> {
        match self.nodes.get(&o.object_id) {
            Some(n) if n.kind == NodeKind::DataObject => {}
            Some(n) => {
                return Err(GraphError::InvalidOverride(format!("{} is a {}, not a data object", n.id, n.kind)))
            }
            None => return Err(GraphError::UnknownObject(o.object_id.clone())),
        }
        o.validate().map_err(|e| GraphError::InvalidOverride(e.to_string()))?;
        let list = self.overrides.entry(o.object_id.clone()).or_default();
        if list.contains(&o) {
            return Ok(EdgeOutcome::Deduplicated);
        }
        list.push(o);
        list.sort_by(|a, b| {
            (a.timestamp, a.dimension, &a.curator_id)
                .cmp(&(b.timestamp, b.dimension, &b.curator_id))
                .then(a.value.total_cmp(&b.value))
        });
        Ok(EdgeOutcome::Acknowledged)
    }

    pub fn overrides_for(&self, object_id: &str) -> &[CuratorOverride] {
        self.overrides.get(object_id).map(Vec::as_slice).unwrap_or(&[])
    }

    fn edges_out(&self, id: &str, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.outgoing
            .get(id)
            .into_iter()
            .flatten()
            .filter(move |k| k.kind == kind)
            .map(|k| &self.edges[k])
    }

    fn edges_in(&self, id: &str, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.incoming
            .get(id)
            .into_iter()
            .flatten()
            .filter(move |k| k.kind == kind)
            .map(|k| &self.edges[k])
    }

    fn require(&self, id: &str, kind: NodeKind) -> Result<()> {
        match self.nodes.get(id) {
            Some(n) if n.kind == kind => Ok(()),
            _ if kind == NodeKind::Researcher => Err(GraphError::UnknownResearcher(id.to_string())),
            _ => Err(GraphError::UnknownObject(id.to_string())),
        }
    }

    /// Objects the researcher contributed to, sorted by id.
    pub fn contributions_of(&self, researcher_id: &str) -> Result<Vec<String>> {
        self.require(researcher_id, NodeKind::Researcher)?;
        let set: BTreeSet<&str> =
            self.edges_out(researcher_id, EdgeKind::ContributedTo).map(|e| e.dst.as_str()).collect();
        Ok(set.into_iter().map(str::to_string).collect())
    }

    /// Researchers who contributed to the object, sorted by id.
    pub fn contributors_of(&self, object_id: &str) -> Result<Vec<String>> {
        self.require(object_id, NodeKind::DataObject)?;
        let set: BTreeSet<&str> =
            self.edges_in(object_id, EdgeKind::ContributedTo).map(|e| e.src.as_str()).collect();
        Ok(set.into_iter().map(str::to_string).collect())
    }

    /// Institutions that the object's contributors were affiliated with when
    /// contributing to it, sorted by id.
    pub fn institutions_of(&self, object_id: &str) -> Result<Vec<String>> {
        let contributors = self.contributors_of(object_id)?;
        let mut set = BTreeSet::new();
        for r in &contributors {
            for e in self.edges_out(r, EdgeKind::AffiliatedWith) {
                if e.object.as_deref() == Some(object_id) {
                    set.insert(e.dst.clone());
                }
            }
        }
        Ok(set.into_iter().collect())
    }

    /// Distinct authors and institutions of an object. Objects without any
    /// recorded affiliation count one institution.
    pub fn collaboration_counts(&self, object_id: &str) -> Result<CollaborationCounts> {
        let authors = self.contributors_of(object_id)?.len() as u64;
        if authors == 0 {
            return Err(GraphError::NoContributors(object_id.to_string()));
        }
        let institutions = (self.institutions_of(object_id)?.len() as u64).max(1);
        Ok(CollaborationCounts { n_authors: authors, n_institutions: institutions })
    }

    /// Reuse events of an object dated on or before `as_of` (all events when
    /// `None`), ordered by (date, source id, event kind).
    pub fn reuse_events(&self, object_id: &str, as_of: Option<NaiveDate>) -> Result<Vec<ReuseEvent>> {
        self.require(object_id, NodeKind::DataObject)?;
        let mut events: Vec<ReuseEvent> = self
            .edges_out(object_id, EdgeKind::ReusedBy)
            .filter(|e| match (as_of, e.occurred) {
                (Some(bound), Some(d)) => d <= bound,
                _ => true,
            })
            .map(|e| ReuseEvent {
                source_id: e.dst.clone(),
                event_kind: e.event_kind.clone().unwrap_or_default(),
                occurred: e.occurred.expect("reused_by edges are dated"),
                weight_override: e.weight,
            })
            .collect();
        events.sort_by(|a, b| {
            (a.occurred, &a.source_id, &a.event_kind).cmp(&(b.occurred, &b.source_id, &b.event_kind))
        });
        Ok(events)
    }

    /// One weight per reuse event, in [`reuse_events`](Self::reuse_events)
    /// order: the per-event override if present, else the kind's weight.
    pub fn reuse_weights(
        &self,
        object_id: &str,
        as_of: Option<NaiveDate>,
        kind_weights: &BTreeMap<String, f64>,
    ) -> Result<Vec<ReuseWeight>> {
        self.reuse_events(object_id, as_of)?
            .iter()
            .map(|ev| event_weight(object_id, ev, kind_weights))
            .collect()
    }

    pub fn snapshot(&self, as_of: Option<NaiveDate>) -> GraphSnapshot {
        GraphSnapshot {
            schema_version: SCHEMA_VERSION,
            as_of,
            nodes: self.nodes.values().cloned().collect(),
            edges: self
                .edges
                .values()
                .filter(|e| match (as_of, e.occurred) {
                    (Some(bound), Some(d)) if e.kind == EdgeKind::ReusedBy => d <= bound,
                    _ => true,
                })
                .cloned()
                .collect(),
        }
    }

    /// Write the graph atomically: a temporary file in the target directory is
    /// renamed over `path` only after it has been fully written and synced.
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |source| GraphError::Io { path: path.to_path_buf(), source };
        let bytes = self.to_bytes();
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(&bytes).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(path).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Serialized file contents. Byte-identical for equal graphs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut body = Vec::new();
        let mut line = |record: FileRecord<'_>| {
            serde_json::to_writer(&mut body, &record).expect("graph records serialize");
            body.push(b'\n');
        };
        for n in self.nodes.values() {
            line(FileRecord::Node(n));
        }
        for e in self.edges.values() {
            line(FileRecord::Edge(e));
        }
        for o in self.overrides.values().flatten() {
            line(FileRecord::Override(o));
        }
        let header = FileHeader {
            format: FILE_FORMAT.to_string(),
            schema_version: SCHEMA_VERSION,
            node_count: self.nodes.len(),
            edge_count: self.edges.len(),
            override_count: self.override_count(),
            body_sha256: hex::encode(Sha256::digest(&body)),
        };
        let mut out = serde_json::to_vec(&header).expect("header serializes");
        out.push(b'\n');
        out.extend_from_slice(&body);
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })?;
        let mut reader = BufReader::new(file);
        let mut bytes = Vec::new();
        std::io::Read::read_to_end(&mut reader, &mut bytes)
            .map_err(|source| GraphError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes)
    }

    /// Parse and fully validate a graph file. Nothing is returned unless every
    /// check passes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let integrity = |msg: String| GraphError::Integrity(msg);
        let split = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| integrity("missing header line".into()))?;
        let (head, body) = (&bytes[..split], &bytes[split + 1..]);

        // Check the version before anything else so newer files get a clear error.
        let raw: Value = serde_json::from_slice(head).map_err(|e| integrity(format!("bad header: {e}")))?;
        if raw.get("format").and_then(Value::as_str) != Some(FILE_FORMAT) {
            return Err(integrity("not a qic graph file".into()));
        }
        let found = raw.get("schema_version").and_then(Value::as_u64).unwrap_or(0) as u32;
        if found != SCHEMA_VERSION {
            return Err(GraphError::SchemaVersion { found, expected: SCHEMA_VERSION });
        }
        let header: FileHeader = serde_json::from_value(raw).map_err(|e| integrity(format!("bad header: {e}")))?;
        let digest = hex::encode(Sha256::digest(body));
        if digest != header.body_sha256 {
            return Err(integrity(format!("body checksum {digest} does not match header {}", header.body_sha256)));
        }

        let mut g = KnowledgeGraph::new();
        let mut section = 0u8;
        for (idx, line) in BufReader::new(body).lines().enumerate() {
            let lineno = idx + 2;
            let line = line.map_err(|e| integrity(format!("line {lineno}: {e}")))?;
            let record: OwnedFileRecord =
                serde_json::from_str(&line).map_err(|e| integrity(format!("line {lineno}: {e}")))?;
            let order = record.section();
            if order < section {
                return Err(integrity(format!("line {lineno}: records out of section order")));
            }
            section = order;
            let at = |e: GraphError| integrity(format!("line {lineno}: {e}"));
            match record {
                OwnedFileRecord::Node(n) => {
                    if g.nodes.contains_key(&n.id) {
                        return Err(integrity(format!("line {lineno}: duplicate node {}", n.id)));
                    }
                    g.upsert_node(n).map_err(at)?;
                }
                OwnedFileRecord::Edge(e) => {
                    if g.add_edge(e).map_err(at)? == EdgeOutcome::Deduplicated {
                        return Err(integrity(format!("line {lineno}: duplicate edge")));
                    }
                }
                OwnedFileRecord::Override(o) => {
                    if g.add_override(o).map_err(at)? == EdgeOutcome::Deduplicated {
                        return Err(integrity(format!("line {lineno}: duplicate override")));
                    }
                }
            }
        }
        let counts = (g.node_count(), g.edge_count(), g.override_count());
        let expected = (header.node_count, header.edge_count, header.override_count);
        if counts != expected {
            return Err(integrity(format!("record counts {counts:?} do not match header {expected:?}")));
        }
        Ok(g)
    }
}

pub(crate) fn event_weight(
    object_id: &str,
    ev: &ReuseEvent,
    kind_weights: &BTreeMap<String, f64>,
) -> Result<ReuseWeight> {
    let value = match ev.weight_override {
        Some(w) => w,
        None => *kind_weights
            .get(&ev.event_kind)
            .ok_or_else(|| GraphError::UnmappedEventKind(ev.event_kind.clone()))?,
    };
    ReuseWeight::new(value).map_err(|_| GraphError::InvalidWeight {
        object: object_id.to_string(),
        source_id: ev.source_id.clone(),
        value,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct FileHeader {
    format: String,
    schema_version: u32,
    node_count: usize,
    edge_count: usize,
    override_count: usize,
    body_sha256: String,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum FileRecord<'a> {
    Node(&'a Node),
    Edge(&'a Edge),
    Override(&'a CuratorOverride),
}

#[derive(Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum OwnedFileRecord {
    Node(Node),
    Edge(Edge),
    Override(CuratorOverride),
}

impl OwnedFileRecord {
    fn section(&self) -> u8 {
        match self {
            Self::Node(_) => 0,
            Self::Edge(_) => 1,
            Self::Override(_) => 2,
        }
    }
}
