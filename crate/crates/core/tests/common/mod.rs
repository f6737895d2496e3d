//! Brute-force scorer used as an oracle for `recompute`.
//!
//! It walks raw nodes and edges, re-derives every component with the default
//! rule table and default config written out longhand, and sums in the same
//! order the engine documents (rules in file order, events by
//! (date, source, kind), contributions by object id).

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use qic_core::graph::{EdgeKind, KnowledgeGraph, NodeKind};
use qic_core::Dimension;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleObject {
    pub q: f64,
    pub i: f64,
    pub c: f64,
    pub s: f64,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleReport {
    pub objects: BTreeMap<String, OracleObject>,
    pub researchers: BTreeMap<String, f64>,
}

const OPEN_LICENSES: [&str; 5] = ["CC0-1.0", "CC-BY-4.0", "CC-BY-SA-4.0", "MIT", "Apache-2.0"];
const STANDARD_FORMATS: [&str; 5] = [
    "text/csv",
    "application/json",
    "application/x-netcdf",
    "application/x-parquet",
    "text/tab-separated-values",
];

fn default_kind_weight(kind: &str) -> f64 {
    match kind {
        "citation" => 1.0,
        "derived_dataset" => 1.0,
        "mention" => 0.25,
        "download_batch" => 0.1,
        other => panic!("oracle: unexpected reuse kind {other}"),
    }
}

fn str_field<'a>(m: &'a Value, k: &str) -> Option<&'a str> {
    m.get(k).and_then(Value::as_str)
}

fn bool_field(m: &Value, k: &str) -> bool {
    m.get(k).and_then(Value::as_bool).unwrap_or(false)
}

fn sum_clamped(points: &[f64]) -> f64 {
    let mut acc = 0.0;
    for p in points {
        acc += p;
    }
    acc.clamp(0.0, 1.0)
}

/// Default-rule FAIR sub-scores (F, A, I, R) of a metadata JSON object.
pub fn fair_subscores(m: &Value) -> [f64; 4] {
    let scheme = str_field(m, "identifier_scheme").unwrap_or("none");
    let title = str_field(m, "title").unwrap_or("");
    let desc = m.get("description_chars").and_then(Value::as_u64).unwrap_or(0);
    let keywords = m.get("keywords").and_then(Value::as_array).map_or(0, Vec::len);
    let license = str_field(m, "license_id").filter(|s| !s.is_empty());
    let url = str_field(m, "access_url").filter(|s| !s.is_empty());
    let protocol = str_field(m, "access_protocol").unwrap_or("none");
    let formats: Vec<&str> = m
        .get("formats")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_str).collect())
        .unwrap_or_default();
    let completeness = m.get("completeness_ratio").and_then(Value::as_f64).unwrap_or(0.0);

    let mut f = Vec::new();
    if matches!(scheme, "doi" | "handle" | "ark") {
        f.push(0.5);
    }
    if !title.trim().is_empty() && desc >= 200 && keywords >= 3 {
        f.push(0.5);
    }
    let mut a = Vec::new();
    if url.is_some() {
        a.push(0.5);
    }
    if license.is_some_and(|l| OPEN_LICENSES.contains(&l)) {
        a.push(0.3);
    }
    if protocol == "https" {
        a.push(0.2);
    }
    let mut i = Vec::new();
    if formats.iter().any(|f| STANDARD_FORMATS.contains(f)) {
        i.push(0.5);
    }
    if bool_field(m, "uses_standard_schema") {
        i.push(0.5);
    }
    let mut r = Vec::new();
    if license.is_some() {
        r.push(0.4);
    }
    if bool_field(m, "has_provenance") {
        r.push(0.3);
    }
    if completeness > 0.0 {
        r.push(0.3 * completeness);
    }
    [sum_clamped(&f), sum_clamped(&a), sum_clamped(&i), sum_clamped(&r)]
}

/// Score every object and researcher with the default config, from raw edges.
pub fn brute_force(g: &KnowledgeGraph, as_of: Option<NaiveDate>) -> OracleReport {
    let mut out = OracleReport::default();
    let all_edges: Vec<_> = g.edges().collect();

    let mut object_ids: Vec<&str> =
        g.nodes().filter(|n| n.kind == NodeKind::DataObject).map(|n| n.id.as_str()).collect();
    object_ids.sort();

    for oid in object_ids {
        let node = g.node(oid).unwrap();
        let meta = node.attributes.get("metadata").cloned().unwrap_or(Value::Null);
        let mut sub = fair_subscores(&meta);
        for (k, d) in Dimension::ALL.iter().enumerate() {
            let mut best: Option<(chrono::DateTime<chrono::Utc>, f64)> = None;
            for o in g.overrides_for(oid).iter().filter(|o| o.dimension == *d) {
                if best.map_or(true, |(t, _)| o.timestamp > t) {
                    best = Some((o.timestamp, o.value));
                }
            }
            if let Some((_, v)) = best {
                sub[k] = v;
            }
        }
        let q = (0.25 * sub[0] + 0.25 * sub[1] + 0.25 * sub[2] + 0.25 * sub[3]).clamp(0.0, 1.0);

        let mut reuses: Vec<(NaiveDate, &str, &str, f64)> = all_edges
            .iter()
            .filter(|e| e.kind == EdgeKind::ReusedBy && e.src == oid)
            .filter(|e| as_of.map_or(true, |bound| e.occurred.unwrap() <= bound))
            .map(|e| {
                let kind = e.event_kind.as_deref().unwrap();
                let w = e.weight.unwrap_or_else(|| default_kind_weight(kind));
                (e.occurred.unwrap(), e.dst.as_str(), kind, w)
            })
            .collect();
        reuses.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        let mut total = 0.0;
        for r in &reuses {
            total += r.3;
        }
        let i = if total == 0.0 { 0.0 } else { 1.0 + total.ln_1p() };

        let authors: BTreeSet<&str> = all_edges
            .iter()
            .filter(|e| e.kind == EdgeKind::ContributedTo && e.dst == oid)
            .map(|e| e.src.as_str())
            .collect();
        let institutions: BTreeSet<&str> = all_edges
            .iter()
            .filter(|e| {
                e.kind == EdgeKind::AffiliatedWith
                    && e.object.as_deref() == Some(oid)
                    && authors.contains(e.src.as_str())
            })
            .map(|e| e.dst.as_str())
            .collect();
        let n_a = authors.len() as f64;
        let n_i = institutions.len().max(1) as f64;
        let c = (1.0 + n_a.ln()) * (1.0 + 0.5 * n_i.ln());

        out.objects.insert(oid.to_string(), OracleObject { q, i, c, s: q * i * c, m: reuses.len() });
    }

    let mut researcher_ids: Vec<&str> =
        g.nodes().filter(|n| n.kind == NodeKind::Researcher).map(|n| n.id.as_str()).collect();
    researcher_ids.sort();
    for rid in researcher_ids {
        let objs: BTreeSet<&str> = all_edges
            .iter()
            .filter(|e| e.kind == EdgeKind::ContributedTo && e.src == rid)
            .map(|e| e.dst.as_str())
            .collect();
        let mut total = 0.0;
        for o in objs {
            total += out.objects[o].s;
        }
        out.researchers.insert(rid.to_string(), total);
    }
    out
}

/// Compare a report against the oracle bit for bit. Returns the first mismatch.
pub fn compare(report: &qic_core::ScoreReport, oracle: &OracleReport) -> Result<(), String> {
    if report.objects.len() != oracle.objects.len() {
        return Err(format!("object count {} vs oracle {}", report.objects.len(), oracle.objects.len()));
    }
    for row in &report.objects {
        let o = oracle.objects.get(&row.object_id).ok_or_else(|| format!("oracle lacks {}", row.object_id))?;
        let pairs = [("q", row.q, o.q), ("i", row.i, o.i), ("c", row.c, o.c), ("s", row.s, o.s)];
        for (name, got, want) in pairs {
            if got.to_bits() != want.to_bits() {
                return Err(format!("{} {name}: engine {got:e} vs oracle {want:e}", row.object_id));
            }
        }
        if row.reuse_events != o.m {
            return Err(format!("{} M: engine {} vs oracle {}", row.object_id, row.reuse_events, o.m));
        }
    }
    if report.researchers.len() != oracle.researchers.len() {
        return Err(format!("researcher count {} vs oracle {}", report.researchers.len(), oracle.researchers.len()));
    }
    for row in &report.researchers {
        let want = oracle.researchers.get(&row.researcher_id).ok_or_else(|| format!("oracle lacks {}", row.researcher_id))?;
        if row.s_total.to_bits() != want.to_bits() {
            return Err(format!("{} S: engine {:e} vs oracle {want:e}", row.researcher_id, row.s_total));
        }
    }
    Ok(())
}
