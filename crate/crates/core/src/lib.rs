//! Quality × impact × collaboration scoring for shared research data.
//!
//! The pipeline runs ingestion ([`ingest`]) into a knowledge graph
//! ([`graph`]), FAIR assessment ([`fair`]), and full recomputation of object
//! and researcher scores ([`monitor`]) using the formulas in [`metric`].

pub mod config;
pub mod fair;
pub mod graph;
pub mod ingest;
pub mod metric;
pub mod monitor;
pub mod synth;

pub use config::{Config, ConfigError};
pub use fair::{CuratorOverride, Dimension, FairAssessment, FairEngine, ObjectMetadata, Provenance, RuleSet};
pub use graph::{Edge, EdgeKind, GraphError, KnowledgeGraph, Node, NodeKind};
pub use ingest::{IngestError, IngestReport, RecordType, ReuseKind};
pub use metric::{
    collaboration_score, impact_score, object_score, quality_score, researcher_index, CollaborationCounts,
    FairSubScores, FairWeights, MetricError, ObjectScore, ResearcherIndex, ReuseWeight, ZeroReusePolicy,
};
pub use monitor::{explain, rank, recompute, snapshot, Explanation, MonitorError, ScoreReport, SnapshotSeries};
