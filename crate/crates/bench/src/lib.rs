//! Shared workloads for the criterion benches.

use qic_core::synth::{random_graph, SynthParams};
use qic_core::KnowledgeGraph;

/// Seeded synthetic graph with roughly `edges` edges.
pub fn workload(edges: usize) -> KnowledgeGraph {
    random_graph(0x51c, SynthParams::with_edges(edges))
}
