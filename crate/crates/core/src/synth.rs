//! Seeded random graphs for property tests and benchmarks.

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fair::{AccessProtocol, CuratorOverride, Dimension, IdentifierScheme, ObjectMetadata};
use crate::graph::{Edge, KnowledgeGraph, Node, NodeKind};
use crate::ingest::ReuseKind;

#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub researchers: usize,
    pub institutions: usize,
    pub objects: usize,
    pub sources: usize,
    /// Approximate total edge count to aim for.
    pub target_edges: usize,
}

impl SynthParams {
    /// Population sized so the graph lands near `edges` edges.
    pub fn with_edges(edges: usize) -> Self {
        let objects = (edges / 12).max(1);
        Self {
            researchers: (edges / 8).max(2),
            institutions: (edges / 60).max(2),
            objects,
            sources: (edges / 4).max(2),
            target_edges: edges,
        }
    }
}

fn random_metadata(rng: &mut ChaCha8Rng) -> ObjectMetadata {
    let schemes = [IdentifierScheme::Doi, IdentifierScheme::Handle, IdentifierScheme::Ark, IdentifierScheme::Url, IdentifierScheme::None];
    let protocols = [AccessProtocol::Https, AccessProtocol::Ftp, AccessProtocol::Other, AccessProtocol::None];
    let licenses = [None, Some("CC-BY-4.0"), Some("MIT"), Some("Proprietary")];
    let formats = ["text/csv", "application/json", "application/vnd.ms-excel", "image/tiff"];
    ObjectMetadata {
        identifier_scheme: *schemes.choose(rng).unwrap(),
        title: if rng.gen_bool(0.9) { "Dataset".into() } else { String::new() },
        description_chars: rng.gen_range(0..600),
        keywords: (0..rng.gen_range(0..6)).map(|k| format!("kw{k}")).collect(),
        license_id: licenses.choose(rng).unwrap().map(str::to_string),
        access_url: rng.gen_bool(0.7).then(|| "https://repo.example/x".to_string()),
        access_protocol: *protocols.choose(rng).unwrap(),
        formats: (0..rng.gen_range(0..3)).map(|_| formats.choose(rng).unwrap().to_string()).collect(),
        uses_standard_schema: rng.gen_bool(0.5),
        has_provenance: rng.gen_bool(0.5),
        completeness_ratio: rng.gen_range(0..=20) as f64 / 20.0,
    }
}

/// A valid random graph: every object has at least one contributor; reuse
/// events are dated within 2015..2025; some objects carry curator overrides.
pub fn random_graph(seed: u64, params: SynthParams) -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = KnowledgeGraph::new();
    let researchers: Vec<String> = (0..params.researchers).map(|k| format!("orcid:r{k:06}")).collect();
    let institutions: Vec<String> = (0..params.institutions).map(|k| format!("ror:i{k:05}")).collect();
    let objects: Vec<String> = (0..params.objects).map(|k| format!("doi:10.9999/o{k:06}")).collect();
    let sources: Vec<String> = (0..params.sources).map(|k| format!("doi:10.8888/s{k:06}")).collect();

    for r in &researchers {
        g.upsert_node(Node::new(r, NodeKind::Researcher)).unwrap();
    }
    for i in &institutions {
        g.upsert_node(Node::new(i, NodeKind::Institution)).unwrap();
    }
    for s in &sources {
        g.upsert_node(Node::new(s, NodeKind::ReuseSource)).unwrap();
    }
    let base = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap();
    let kinds = ReuseKind::ALL;
    let per_object = params.target_edges / params.objects.max(1);

    for o in &objects {
        let meta = serde_json::to_value(random_metadata(&mut rng)).unwrap();
        g.upsert_node(Node::new(o, NodeKind::DataObject).with_attr("metadata", meta)).unwrap();

        let team = rng.gen_range(1..=per_object.clamp(1, 12).min(researchers.len()));
        for r in researchers.choose_multiple(&mut rng, team) {
            g.add_edge(Edge::contribution(r, o)).unwrap();
            if rng.gen_bool(0.8) {
                let inst = institutions.choose(&mut rng).unwrap();
                g.add_edge(Edge::affiliation(r, inst, o)).unwrap();
            }
        }
        let budget = per_object.saturating_sub(team * 2);
        let reuses = if rng.gen_bool(0.15) { 0 } else { rng.gen_range(0..=budget.max(1) * 2) };
        for _ in 0..reuses {
            let src = sources.choose(&mut rng).unwrap();
            let kind = kinds.choose(&mut rng).unwrap();
            let day = base.checked_add_days(Days::new(rng.gen_range(0..3650))).unwrap();
            let weight = rng.gen_bool(0.1).then(|| rng.gen_range(0..=40) as f64 / 8.0);
            let _ = g.add_edge(Edge::reuse(o, src, kind.as_str(), day, weight)).unwrap();
        }
        if rng.gen_bool(0.2) {
            let day = rng.gen_range(0..1000);
            g.add_override(CuratorOverride {
                object_id: o.clone(),
                dimension: *Dimension::ALL.choose(&mut rng).unwrap(),
                value: rng.gen_range(0..=10) as f64 / 10.0,
                curator_id: "orcid:curator".into(),
                timestamp: chrono::DateTime::from_timestamp(1_600_000_000 + day * 86_400, 0).unwrap(),
            })
            .unwrap();
        }
    }
    g
}
