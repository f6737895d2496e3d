//! Acceptance suite. Each test prints one `ACn PASS|FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` doubles as a
//! checklist.

mod common;

use std::time::Instant;

use chrono::{DateTime, NaiveDate, Utc};
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use qic_core::fair::{sub_score, AccessProtocol, IdentifierScheme, Predicate, RuleSet, Vocabulary};
use qic_core::graph::NodeKind;
use qic_core::ingest::persona_fixture;

use qic_core::synth::{random_graph, SynthParams};
use qic_core::*;

const SINGH: &str = "orcid:0000-0002-1000-0001";
const AL_JAMIL: &str = "orcid:0000-0003-2000-0002";

fn verdict(id: &str, title: &str, outcome: Result<String, String>) {
    match &outcome {
        Ok(detail) => println!("{id} PASS {title}: {detail}"),
        Err(detail) => println!("{id} FAIL {title}: {detail}"),
    }
    if let Err(detail) = outcome {
        panic!("{id} failed: {detail}");
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn ac1_formula_exactness() {
    let outcome = (|| {
        let ten = vec![ReuseWeight::new(1.0).unwrap(); 10];
        let i = impact_score(&ten, ZeroReusePolicy::Annihilate).map_err(|e| e.to_string())?;
        let i_want = 3.3978952727983707_f64; // 1 + ln 11
        check((i - i_want).abs() <= 1e-12, || format!("impact {i} vs {i_want}"))?;

        let c = collaboration_score(CollaborationCounts::new(10, 4).unwrap()).map_err(|e| e.to_string())?;
        let c_want = 5.591762638762173_f64; // (1 + ln 10)(1 + 0.5 ln 4)
        check((c - c_want).abs() <= 1e-9, || format!("collaboration {c} vs {c_want}"))?;

        let q = quality_score(
            &FairSubScores::new(0.9, 0.8, 0.6, 0.7).unwrap(),
            &FairWeights::new(0.4, 0.2, 0.2, 0.2).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        check((q - 0.78).abs() <= 1e-12, || format!("quality {q} vs 0.78"))?;
        Ok(format!("I(10x1)={i:.15} C(10,4)={c:.15} Q={q:.15}"))
    })();
    verdict("AC1", "formula exactness", outcome);
}

fn sub_scores() -> impl Strategy<Value = FairSubScores> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64)
        .prop_map(|(f, a, i, r)| FairSubScores::new(f, a, i, r).unwrap())
}

fn weights() -> impl Strategy<Value = FairWeights> {
    (0u32..=100, 0u32..=100, 0u32..=100).prop_filter_map("weights exceed 1", |(a, b, c)| {
        let (a, b, c) = (a as f64 / 100.0, b as f64 / 100.0, c as f64 / 100.0);
        let r = 1.0 - a - b - c;
        (r >= 0.0).then(|| FairWeights::new(a, b, c, r).ok()).flatten()
    })
}

#[test]
fn ac2_annihilation() {
    let mut runner = TestRunner::new(PtConfig::with_cases(1000));
    let strategy = (
        sub_scores(),
        weights(),
        1u64..500,
        1u64..50,
        prop::collection::vec(prop_oneof![Just(0.0), 0.0..10.0f64], 0..20),
    );
    let zero_reuse = runner.run(&strategy, |(sub, w, na, ni, reuse)| {
        let q = quality_score(&sub, &w).unwrap();
        let c = collaboration_score(CollaborationCounts::new(na, ni).unwrap()).unwrap();
        // No events at all, or events whose weights are all zero.
        for ws in [Vec::new(), vec![ReuseWeight::new(0.0).unwrap(); reuse.len()]] {
            let i = impact_score(&ws, ZeroReusePolicy::Annihilate).unwrap();
            let s = object_score(q, i, c).unwrap().s;
            prop_assert_eq!(s.to_bits(), 0.0f64.to_bits());
        }
        // q = 0 with arbitrary reuse.
        let ws: Vec<_> = reuse.iter().map(|&x| ReuseWeight::new(x).unwrap()).collect();
        let i = impact_score(&ws, ZeroReusePolicy::Annihilate).unwrap();
        let zero_q = quality_score(&FairSubScores::new(0.0, 0.0, 0.0, 0.0).unwrap(), &w).unwrap();
        prop_assert_eq!(object_score(zero_q, i, c).unwrap().s.to_bits(), 0.0f64.to_bits());
        Ok(())
    });

    // The same holds end to end: every unreused or quality-free object in a
    // random graph scores exactly zero.
    let mut pipeline_checked = 0usize;
    let pipeline = (|| {
        for seed in 0..4 {
            let g = random_graph(seed, SynthParams::with_edges(3000));
            let report = recompute(&g, &Config::default(), None).map_err(|e| e.to_string())?;
            for row in &report.objects {
                if row.reuse_events == 0 || row.q == 0.0 {
                    pipeline_checked += 1;
                    check(row.s.to_bits() == 0.0f64.to_bits(), || format!("{} s={}", row.object_id, row.s))?;
                }
            }
        }
        check(pipeline_checked > 0, || "no zero-reuse objects generated".into())
    })();

    let outcome = match (zero_reuse, pipeline) {
        (Ok(()), Ok(())) => Ok(format!("1000 randomized objects + {pipeline_checked} graph objects, s == 0 exactly")),
        (Err(e), _) => Err(e.to_string()),
        (_, Err(e)) => Err(e),
    };
    verdict("AC2", "annihilation", outcome);
}

#[test]
fn ac3_monotonicity_and_concavity() {
    let mut runner = TestRunner::new(PtConfig::with_cases(500));
    // Prefix of arbitrary positive events, then a run of equal-sized events.
    let strategy = (prop::collection::vec(1e-3..100.0f64, 0..30), 1e-2..10.0f64, 2usize..40);
    let impact = runner.run(&strategy, |(prefix, d, run)| {
        let mut ws: Vec<ReuseWeight> = Vec::new();
        let mut prev = impact_score(&ws, ZeroReusePolicy::Annihilate).unwrap();
        for &x in &prefix {
            ws.push(ReuseWeight::new(x).unwrap());
            let next = impact_score(&ws, ZeroReusePolicy::Annihilate).unwrap();
            prop_assert!(next > prev, "impact did not increase: {} -> {}", prev, next);
            prev = next;
        }
        let mut prev_increment = f64::INFINITY;
        for _ in 0..run {
            ws.push(ReuseWeight::new(d).unwrap());
            let next = impact_score(&ws, ZeroReusePolicy::Annihilate).unwrap();
            let increment = next - prev;
            prop_assert!(increment > 0.0);
            prop_assert!(increment < prev_increment, "increment {} !< {}", increment, prev_increment);
            prev_increment = increment;
            prev = next;
        }
        Ok(())
    });

    let mut runner = TestRunner::new(PtConfig::with_cases(500));
    let collab = runner.run(&(1u64..1_000_000, 1u64..1_000_000), |(a, n)| {
        let c = |a, n| collaboration_score(CollaborationCounts::new(a, n).unwrap()).unwrap();
        prop_assert!(c(a + 1, n) > c(a, n));
        prop_assert!(c(a, n + 1) > c(a, n));
        Ok(())
    });

    let outcome = match (impact, collab) {
        (Ok(()), Ok(())) => Ok("500 impact sequences, 500 collaboration pairs".to_string()),
        (Err(e), _) => Err(e.to_string()),
        (_, Err(e)) => Err(e.to_string()),
    };
    verdict("AC3", "monotonicity and concavity", outcome);
}

#[test]
fn ac4_oracle_equivalence() {
    let started = Instant::now();
    let outcome = (|| {
        let cutoffs = [None, NaiveDate::from_ymd_opt(2019, 6, 30), NaiveDate::from_ymd_opt(2014, 1, 1)];
        let mut graphs = 0;
        let mut largest = 0;
        for (seed, edges) in [(1u64, 50usize), (2, 300), (3, 1_000), (4, 3_000), (5, 8_400)] {
            let g = random_graph(seed, SynthParams::with_edges(edges));
            check(g.edge_count() <= 10_000, || format!("seed {seed}: {} edges", g.edge_count()))?;
            largest = largest.max(g.edge_count());
            for as_of in cutoffs {
                let report = recompute(&g, &Config::default(), as_of).map_err(|e| e.to_string())?;
                common::compare(&report, &common::brute_force(&g, as_of))
                    .map_err(|e| format!("seed {seed} as_of {as_of:?}: {e}"))?;
            }
            graphs += 1;
        }
        let elapsed = started.elapsed();
        check(elapsed.as_secs_f64() < 10.0, || format!("took {elapsed:?}"))?;
        Ok(format!("{graphs} graphs (largest {largest} edges) x 3 cutoffs bit-exact in {elapsed:.2?}"))
    })();
    verdict("AC4", "oracle equivalence", outcome);
}

#[test]
fn ac5_persona_scenario() {
    let outcome = (|| {
        let mut g = KnowledgeGraph::new();
        let ingest = persona_fixture().ingest(&mut g).map_err(|e| e.to_string())?;
        check(ingest.rejected() == 0, || format!("{} rejections", ingest.rejected()))?;
        let report = recompute(&g, &Config::default(), None).map_err(|e| e.to_string())?;
        let s = |id: &str| report.researcher(id).map(|r| r.s_total).ok_or(format!("missing {id}"));
        let (singh, al_jamil) = (s(SINGH)?, s(AL_JAMIL)?);
        check(singh > al_jamil && al_jamil > 0.0, || format!("S_singh={singh} S_aljamil={al_jamil}"))?;

        let c_of = |id: &str| -> Result<Vec<f64>, String> {
            let rows = report.contributions_of(&g, id).map_err(|e| e.to_string())?;
            Ok(rows.iter().filter(|r| r.s > 0.0).map(|r| r.c).collect())
        };
        let singh_c = c_of(SINGH)?;
        let al_c = c_of(AL_JAMIL)?;
        let singh_max = singh_c.iter().cloned().fold(f64::MIN, f64::max);
        let al_min = al_c.iter().cloned().fold(f64::MAX, f64::min);
        check(!singh_c.is_empty() && al_c.len() == 2, || format!("scored objects {singh_c:?} {al_c:?}"))?;
        check(al_min > singh_max, || format!("C Al-Jamil {al_c:?} vs Singh {singh_c:?}"))?;
        Ok(format!("S_singh={singh:.6} > S_aljamil={al_jamil:.6} > 0; C {al_c:.3?} > {singh_c:.3?}"))
    })();
    verdict("AC5", "persona scenario", outcome);
}

fn full_run() -> Result<(KnowledgeGraph, String), String> {
    let mut g = KnowledgeGraph::new();
    persona_fixture().ingest(&mut g).map_err(|e| e.to_string())?;
    let report = recompute(&g, &Config::default(), None).map_err(|e| e.to_string())?;
    Ok((g, report.to_jsonl()))
}

#[test]
fn ac6_idempotence_and_determinism() {
    let outcome = (|| {
        let mut g = KnowledgeGraph::new();
        let first = persona_fixture().ingest(&mut g).map_err(|e| e.to_string())?;
        let after_first = g.clone();
        let second = persona_fixture().ingest(&mut g).map_err(|e| e.to_string())?;
        check(first.accepted() > 0, || "first ingest accepted nothing".into())?;
        check(second.accepted() == 0 && second.rejected() == 0, || {
            format!("second ingest: {} accepted, {} rejected", second.accepted(), second.rejected())
        })?;
        check(second.deduplicated() == first.accepted(), || {
            format!("{} deduplicated vs {} first accepted", second.deduplicated(), first.accepted())
        })?;
        check(g == after_first, || "graph changed on re-ingest".into())?;
        check(g.to_bytes() == after_first.to_bytes(), || "serialized graph changed".into())?;

        let (_, a) = full_run()?;
        let (_, b) = full_run()?;
        check(a == b, || "two runs produced different JSON".into())?;
        Ok(format!("{} records deduplicated on replay; {}-byte reports identical", second.deduplicated(), a.len()))
    })();
    verdict("AC6", "idempotence and determinism", outcome);
}

#[test]
fn ac7_persistence_round_trip() {
    let outcome = (|| {
        let params = SynthParams { researchers: 30, institutions: 8, objects: 30, sources: 32, target_edges: 600 };
        let g = random_graph(77, params);
        check(g.node_count() == 100, || format!("{} nodes", g.node_count()))?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let path = dir.path().join("graph.jsonl");
        g.save(&path).map_err(|e| e.to_string())?;
        let loaded = KnowledgeGraph::load(&path).map_err(|e| e.to_string())?;
        check(loaded == g, || "loaded graph differs".into())?;

        let weights = Config::default().reuse_weights;
        let dates = [None, NaiveDate::from_ymd_opt(2018, 1, 1), NaiveDate::from_ymd_opt(2030, 1, 1)];
        let mut queries = 0usize;
        for node in g.nodes() {
            let id = node.id.as_str();
            check(loaded.node(id) == Some(node), || format!("node {id}"))?;
            match node.kind {
                NodeKind::Researcher => {
                    check(
                        loaded.contributions_of(id).map_err(|e| e.to_string())?
                            == g.contributions_of(id).map_err(|e| e.to_string())?,
                        || format!("contributions_of {id}"),
                    )?;
                    queries += 1;
                }
                NodeKind::DataObject => {
                    let pairs = [
                        (format!("{:?}", loaded.contributors_of(id)), format!("{:?}", g.contributors_of(id))),
                        (format!("{:?}", loaded.institutions_of(id)), format!("{:?}", g.institutions_of(id))),
                        (format!("{:?}", loaded.collaboration_counts(id)), format!("{:?}", g.collaboration_counts(id))),
                        (format!("{:?}", loaded.overrides_for(id)), format!("{:?}", g.overrides_for(id))),
                    ];
                    for (a, b) in pairs {
                        check(a == b, || format!("query on {id}: {a} vs {b}"))?;
                    }
                    for d in dates {
                        check(
                            format!("{:?}", loaded.reuse_events(id, d)) == format!("{:?}", g.reuse_events(id, d)),
                            || format!("reuse_events {id}"),
                        )?;
                        check(
                            format!("{:?}", loaded.reuse_weights(id, d, &weights))
                                == format!("{:?}", g.reuse_weights(id, d, &weights)),
                            || format!("reuse_weights {id}"),
                        )?;
                    }
                    queries += 4 + 2 * dates.len();
                }
                _ => {}
            }
        }
        for d in dates {
            let a = recompute(&g, &Config::default(), d).map_err(|e| e.to_string())?;
            let b = recompute(&loaded, &Config::default(), d).map_err(|e| e.to_string())?;
            check(a == b && a.to_jsonl() == b.to_jsonl(), || format!("scores differ at {d:?}"))?;
        }
        Ok(format!("{} nodes, {} edges, {queries} queries and 3 score reports identical", g.node_count(), g.edge_count()))
    })();
    verdict("AC7", "persistence round-trip", outcome);
}

fn metadata_space() -> Vec<ObjectMetadata> {
    let schemes = [IdentifierScheme::Doi, IdentifierScheme::Handle, IdentifierScheme::Ark, IdentifierScheme::Url, IdentifierScheme::None];
    let titles = ["", "Survey data"];
    let descs = [0u64, 199, 200, 800];
    let keyword_counts = [0usize, 2, 3, 6];
    let urls = [None, Some("https://repo.example/d")];
    let licenses = [None, Some("CC-BY-4.0"), Some("Proprietary")];
    let protocols = [AccessProtocol::Https, AccessProtocol::Ftp, AccessProtocol::Other, AccessProtocol::None];
    let formats: [&[&str]; 4] = [&[], &["text/csv"], &["image/tiff"], &["image/tiff", "application/json"]];
    let ratios = [0.0, 0.25, 0.5, 1.0];

    let mut out = Vec::new();
    for scheme in schemes {
        for title in titles {
            for desc in descs {
                for kw in keyword_counts {
                    for url in urls {
                        for license in licenses {
                            for protocol in protocols {
                                for fmt in formats {
                                    for schema in [false, true] {
                                        for prov in [false, true] {
                                            for ratio in ratios {
                                                out.push(ObjectMetadata {
                                                    identifier_scheme: scheme,
                                                    title: title.into(),
                                                    description_chars: desc,
                                                    keywords: (0..kw).map(|k| format!("k{k}")).collect(),
                                                    license_id: license.map(String::from),
                                                    access_url: url.map(String::from),
                                                    access_protocol: protocol,
                                                    formats: fmt.iter().map(|s| s.to_string()).collect(),
                                                    uses_standard_schema: schema,
                                                    has_provenance: prov,
                                                    completeness_ratio: ratio,
                                                });
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn ac8_fair_rule_engine() {
    let outcome = (|| {
        let rules = RuleSet::default();
        rules.validate().map_err(|e| e.to_string())?;
        for d in Dimension::ALL {
            let total: f64 = rules.rules(d).iter().map(|r| r.points).sum();
            check((total - 1.0).abs() <= 1e-12, || format!("{d:?} points sum to {total}"))?;
        }
        let engine = FairEngine::new(rules, Vocabulary::default());

        let space = metadata_space();
        let mut seen = std::collections::BTreeSet::new();
        for m in &space {
            for d in Dimension::ALL {
                let (score, _) = engine.evaluate(d, m);
                check((0.0..=1.0).contains(&score), || format!("{d:?} score {score} for {m:?}"))?;
            }
            // Record which predicate combination this metadata realises, so
            // the enumeration provably covers every one.
            let key: Vec<bool> = Predicate::ALL.iter().map(|&p| engine.predicate_fraction(p, m) > 0.0).collect();
            seen.insert(key);
        }
        // An open license is necessarily a license, so that one combination
        // (open, not present) is unreachable; every other one must appear.
        let open = Predicate::ALL.iter().position(|&p| p == Predicate::OpenLicense).unwrap();
        let present = Predicate::ALL.iter().position(|&p| p == Predicate::LicensePresent).unwrap();
        let reachable = (0u32..1 << Predicate::ALL.len())
            .filter(|bits| !(bits >> open & 1 == 1 && bits >> present & 1 == 0))
            .count();
        check(seen.len() == reachable, || format!("covered {} of {reachable} predicate combinations", seen.len()))?;

        let ts = |s: i64| DateTime::<Utc>::from_timestamp(1_700_000_000 + s, 0).unwrap();
        let mut dominance = 0usize;
        for (k, m) in space.iter().enumerate().step_by(97) {
            for d in Dimension::ALL {
                let value = (k % 11) as f64 / 10.0;
                let overrides = vec![
                    CuratorOverride { object_id: "doi:x".into(), dimension: d, value: 1.0 - value, curator_id: "c".into(), timestamp: ts(0) },
                    CuratorOverride { object_id: "doi:x".into(), dimension: d, value, curator_id: "c".into(), timestamp: ts(60) },
                ];
                let a = engine.assess("doi:x", m, &overrides).map_err(|e| e.to_string())?;
                check(sub_score(&a.sub_scores, d).to_bits() == value.to_bits(), || format!("{d:?} not overridden"))?;
                check(a.provenance.get(d) == Provenance::Curated, || format!("{d:?} provenance"))?;
                for other in Dimension::ALL.into_iter().filter(|&o| o != d) {
                    check(sub_score(&a.sub_scores, other) == sub_score(&a.computed, other), || format!("{other:?} disturbed"))?;
                }
                dominance += 1;
            }
        }
        Ok(format!(
            "{} metadata combos, all {} predicate combinations, scores in [0,1]; {dominance} override checks",
            space.len(),
            seen.len()
        ))
    })();
    verdict("AC8", "FAIR rule engine", outcome);
}
