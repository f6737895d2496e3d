use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use qic_core::config::{Config, ConfigError};
use qic_core::graph::KnowledgeGraph;
use qic_core::ingest::{self, AdapterConfig, AdapterRegistry, IngestReport, RecordType};
use qic_core::monitor::{self, curated_flags, fmt_num, render_table, MonitorError, ScoreReport};
use serde_json::{json, Value};

use crate::args::{Cli, Command, ConfigAction, Format, IngestArgs, ScoreTarget};
use crate::CliError;

type CmdResult = Result<(u8, String), CliError>;

struct Context {
    graph: PathBuf,
    config: Option<PathBuf>,
    format: Format,
    policy: Option<qic_core::ZeroReusePolicy>,
    verbose: u8,
}

impl Context {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("qic: {}", msg.as_ref());
        }
    }

    /// Config from file (or defaults), with command-line flags applied.
    fn load_config(&self) -> Result<Config, CliError> {
        let mut config = match &self.config {
            Some(path) => {
                self.log(format!("config {}", path.display()));
                Config::load(path).map_err(|e| CliError::Io(e.to_string()))?
            }
            None => Config::default(),
        };
        if let Some(p) = self.policy {
            config.zero_reuse_policy = p;
        }
        Ok(config)
    }

    fn load_graph(&self) -> Result<KnowledgeGraph, CliError> {
        self.log(format!("graph {}", self.graph.display()));
        KnowledgeGraph::load(&self.graph).map_err(|e| CliError::Io(e.to_string()))
    }

    fn report(&self, as_of: Option<NaiveDate>) -> Result<(KnowledgeGraph, ScoreReport), CliError> {
        let config = self.load_config()?;
        let graph = self.load_graph()?;
        let report = monitor::recompute(&graph, &config, as_of).map_err(monitor_error)?;
        Ok((graph, report))
    }
}

fn resolve(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn monitor_error(e: MonitorError) -> CliError {
    match e {
        MonitorError::UnknownObject(_) | MonitorError::UnknownResearcher(_) => CliError::NotFound(e.to_string()),
        MonitorError::UnorderedDates(..) => CliError::Validation(e.to_string()),
        other => CliError::Io(other.to_string()),
    }
}

fn json_line(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn run(cli: Cli) -> CmdResult {
    let ctx = Context {
        graph: resolve(&cli.graph),
        config: cli.config.as_deref().map(resolve),
        format: cli.format,
        policy: cli.zero_reuse_policy.map(Into::into),
        verbose: cli.verbose,
    };
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&ctx, args),
        Command::Score { target, as_of } => cmd_score(&ctx, target, as_of),
        Command::Rank { top, as_of } => cmd_rank(&ctx, top as usize, as_of),
        Command::Explain { object_id, as_of } => cmd_explain(&ctx, &object_id, as_of),
        Command::Snapshot { dates } => cmd_snapshot(&ctx, &dates),
        Command::Report { as_of } => cmd_report(&ctx, as_of),
        Command::Config { action: ConfigAction::Validate } => cmd_config_validate(&ctx),
    }
}

fn cmd_ingest(ctx: &Context, args: IngestArgs) -> CmdResult {
    let mut graph = if ctx.graph.exists() { ctx.load_graph()? } else { KnowledgeGraph::new() };

    // Read everything up front so an unreadable file aborts before any change.
    let mut batches = Vec::new();
    if let Some(name) = &args.source {
        let mut config = AdapterConfig::new();
        if let Some(dir) = &args.source_dir {
            config.insert("dir".into(), resolve(dir).display().to_string());
        }
        let streams = AdapterRegistry::default().fetch(name, &config).map_err(|e| match e {
            ingest::IngestError::UnknownAdapter(_) => CliError::Validation(e.to_string()),
            other => CliError::Io(other.to_string()),
        })?;
        for (text, t, file) in [
            (&streams.objects, RecordType::DataObject, "objects.jsonl"),
            (&streams.overrides, RecordType::CuratorOverride, "overrides.jsonl"),
            (&streams.events, RecordType::ReuseEvent, "events.jsonl"),
        ] {
            let label = format!("{}/{file}", streams.label);
            batches.push(ingest::parse_str(text, t, &label).map_err(|e| CliError::Io(e.to_string()))?);
        }
    }
    for (files, t) in [
        (&args.objects, RecordType::DataObject),
        (&args.overrides, RecordType::CuratorOverride),
        (&args.events, RecordType::ReuseEvent),
    ] {
        for path in files {
            let file = std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let batch = ingest::parse_records(std::io::BufReader::new(file), t, &path.display().to_string())
                .map_err(|e| CliError::Io(e.to_string()))?;
            batches.push(batch);
        }
    }

    let mut report = IngestReport::default();
    for batch in &batches {
        ctx.log(format!("applying {} ({} records)", batch.source, batch.records.len() + batch.rejections.len()));
        report.merge(ingest::apply(batch, &mut graph));
    }
    graph.save(&ctx.graph).map_err(|e| CliError::Io(e.to_string()))?;

    let out = match ctx.format {
        Format::Json => json_line(&report),
        Format::Table => ingest_table(&report),
    };
    Ok((if report.rejected() > 0 { 2 } else { 0 }, out))
}

fn ingest_table(report: &IngestReport) -> String {
    let rows: Vec<Vec<String>> = [RecordType::DataObject, RecordType::CuratorOverride, RecordType::ReuseEvent]
        .into_iter()
        .map(|t| {
            let c = report.counts(t);
            vec![t.to_string(), c.accepted.to_string(), c.deduplicated.to_string(), c.rejected.to_string()]
        })
        .collect();
    let mut out = render_table(&["records", "accepted", "deduplicated", "rejected"], &rows);
    if !report.rejections.is_empty() {
        out.push_str("\nrejected:\n");
        for r in &report.rejections {
            let _ = writeln!(out, "  {r}");
        }
    }
    out
}

fn cmd_score(ctx: &Context, target: ScoreTarget, as_of: Option<NaiveDate>) -> CmdResult {
    let (graph, report) = ctx.report(as_of)?;
    let out = match target {
        ScoreTarget::Object { id } => {
            let row = report.object(&id).ok_or_else(|| CliError::NotFound(format!("unknown data object {id}")))?;
            match ctx.format {
                Format::Json => json_line(&json!({
                    "object_id": row.object_id, "q": row.q, "i": row.i, "c": row.c, "s": row.s,
                })),
                Format::Table => render_table(
                    &["object", "q", "i", "c", "s"],
                    &[vec![row.object_id.clone(), fmt_num(row.q), fmt_num(row.i), fmt_num(row.c), fmt_num(row.s)]],
                ),
            }
        }
        ScoreTarget::Researcher { id } => {
            let row = report.researcher(&id).ok_or_else(|| CliError::NotFound(format!("unknown researcher {id}")))?;
            let contributions = report.contributions_of(&graph, &id).map_err(monitor_error)?;
            match ctx.format {
                Format::Json => json_line(&json!({
                    "researcher_id": row.researcher_id,
                    "s_total": row.s_total,
                    "contributions": contributions
                        .iter()
                        .map(|c| json!({"object_id": c.object_id, "q": c.q, "i": c.i, "c": c.c, "s": c.s}))
                        .collect::<Vec<Value>>(),
                })),
                Format::Table => {
                    let mut out = format!("{}  S = {}\n\n", row.researcher_id, fmt_num(row.s_total));
                    let rows: Vec<Vec<String>> = contributions
                        .iter()
                        .map(|c| vec![c.object_id.clone(), fmt_num(c.q), fmt_num(c.i), fmt_num(c.c), fmt_num(c.s)])
                        .collect();
                    out.push_str(&render_table(&["object", "q", "i", "c", "s"], &rows));
                    out
                }
            }
        }
    };
    Ok((0, out))
}

fn cmd_rank(ctx: &Context, top: usize, as_of: Option<NaiveDate>) -> CmdResult {
    let (_, report) = ctx.report(as_of)?;
    let ranked = monitor::rank(&report, top);
    let out = match ctx.format {
        Format::Json => ranked
            .iter()
            .enumerate()
            .map(|(k, r)| {
                json_line(&json!({
                    "rank": k + 1, "researcher_id": r.researcher_id, "name": r.name,
                    "s_total": r.s_total, "contributions": r.contributions,
                }))
            })
            .collect(),
        Format::Table => {
            let rows: Vec<Vec<String>> = ranked
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    vec![
                        (k + 1).to_string(),
                        r.researcher_id.clone(),
                        r.name.clone().unwrap_or_default(),
                        fmt_num(r.s_total),
                        r.contributions.to_string(),
                    ]
                })
                .collect();
            render_table(&["rank", "researcher", "name", "S", "objects"], &rows)
        }
    };
    Ok((0, out))
}

fn cmd_explain(ctx: &Context, object_id: &str, as_of: Option<NaiveDate>) -> CmdResult {
    let (_, report) = ctx.report(as_of)?;
    let ex = monitor::explain(&report, object_id).map_err(monitor_error)?;
    if ctx.format == Format::Json {
        return Ok((0, json_line(ex)));
    }
    let mut out = String::new();
    let s = &ex.score;
    let _ = writeln!(out, "{}", ex.object_id);
    let _ = writeln!(out, "s = q x i x c = {} x {} x {} = {}", fmt_num(s.q), fmt_num(s.i), fmt_num(s.c), fmt_num(s.s));
    let _ = writeln!(out, "\nquality (weights f={} a={} i={} r={})", ex.fair_weights.f, ex.fair_weights.a, ex.fair_weights.i, ex.fair_weights.r);
    let sub = &ex.fair.sub_scores;
    let computed = &ex.fair.computed;
    let p = &ex.fair.provenance;
    let dims = [("F", sub.f, computed.f, p.f), ("A", sub.a, computed.a, p.a), ("I", sub.i, computed.i, p.i), ("R", sub.r, computed.r, p.r)];
    let rows: Vec<Vec<String>> = dims
        .iter()
        .map(|(d, v, cv, p)| vec![d.to_string(), fmt_num(*v), fmt_num(*cv), format!("{p:?}").to_lowercase()])
        .collect();
    out.push_str(&render_table(&["dim", "value", "computed", "provenance"], &rows));
    let _ = writeln!(out, "curated: {}", curated_flags(p));
    out.push_str("\nrules fired:\n");
    for hit in &ex.fair.rule_trace {
        let _ = writeln!(out, "  {} {} +{}", hit.dimension, hit.rule_id, hit.points);
    }
    for o in &ex.fair.applied_overrides {
        let _ = writeln!(out, "  override {} = {} by {} at {}", o.dimension, o.value, o.curator_id, o.timestamp.to_rfc3339());
    }
    let _ = writeln!(out, "\nimpact: {}", ex.impact_note);
    if !ex.reuse.is_empty() {
        let rows: Vec<Vec<String>> = ex
            .reuse
            .iter()
            .map(|r| vec![r.event.occurred.to_string(), r.event.event_kind.clone(), r.event.source_id.clone(), r.weight.to_string()])
            .collect();
        out.push_str(&render_table(&["date", "kind", "source", "weight"], &rows));
    }
    let _ = writeln!(
        out,
        "\ncollaboration: {} author(s), {} institution(s)",
        ex.counts.n_authors, ex.counts.n_institutions
    );
    let _ = writeln!(out, "  authors: {}", ex.contributors.join(", "));
    let _ = writeln!(out, "  institutions: {}", if ex.institutions.is_empty() { "(none recorded)".to_string() } else { ex.institutions.join(", ") });
    Ok((0, out))
}

fn cmd_snapshot(ctx: &Context, dates: &[NaiveDate]) -> CmdResult {
    let config = ctx.load_config()?;
    let graph = ctx.load_graph()?;
    let series = monitor::snapshot(&graph, &config, dates).map_err(monitor_error)?;
    let out = match ctx.format {
        Format::Json => series
            .entries
            .iter()
            .map(|e| {
                let totals: serde_json::Map<String, Value> =
                    e.report.researchers.iter().map(|r| (r.researcher_id.clone(), Value::from(r.s_total))).collect();
                json_line(&json!({"as_of": e.as_of.to_string(), "digest": e.digest, "researchers": totals}))
            })
            .collect(),
        Format::Table => {
            let mut headers = vec!["researcher".to_string()];
            headers.extend(series.entries.iter().map(|e| e.as_of.to_string()));
            let researchers = series.entries.first().map(|e| e.report.researchers.as_slice()).unwrap_or(&[]);
            let rows: Vec<Vec<String>> = researchers
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let mut row = vec![r.researcher_id.clone()];
                    row.extend(series.entries.iter().map(|e| fmt_num(e.report.researchers[k].s_total)));
                    row
                })
                .collect();
            let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
            let mut out = render_table(&header_refs, &rows);
            out.push('\n');
            for e in &series.entries {
                let _ = writeln!(out, "{}  {}", e.as_of, e.digest);
            }
            out
        }
    };
    Ok((0, out))
}

fn cmd_report(ctx: &Context, as_of: Option<NaiveDate>) -> CmdResult {
    let (_, report) = ctx.report(as_of)?;
    Ok((
        0,
        match ctx.format {
            Format::Json => report.to_jsonl(),
            Format::Table => report.to_table(),
        },
    ))
}

fn cmd_config_validate(ctx: &Context) -> CmdResult {
    let config = match &ctx.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e @ ConfigError::Io { .. }) => return Err(CliError::Io(e.to_string())),
            Err(e) => return Err(CliError::Validation(e.to_string())),
        },
        None => Config::default(),
    };
    let mut problems = config.violations();
    if problems.is_empty() {
        if let Err(e) = config.fair_engine() {
            problems.push(e.to_string());
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Validation(format!("invalid config:\n  {}", problems.join("\n  "))));
    }
    let source = ctx.config.as_ref().map_or_else(|| "built-in defaults".to_string(), |p| p.display().to_string());
    let out = match ctx.format {
        Format::Json => json_line(&json!({"valid": true, "config": source})),
        Format::Table => format!("config OK ({source})\n"),
    };
    Ok((0, out))
}
