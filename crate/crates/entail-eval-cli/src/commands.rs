//! Flag definitions and the implementation of each subcommand.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Subcommand};
use serde::Serialize;

use entail_eval::gateway::{Gateway, GatewayOptions, RemoteBackend, TranscriptCache};
use entail_eval::harness::{
    ingest, ordering_from_report, recompute_aggregates, report_config, run_evaluate,
    run_reliability, to_rounded_json, DatasetFile, DatasetFormat, FieldMap, OrderingReport,
    ReliabilityReport, RunOptions, RunReport,
};
use entail_eval::model::{BackendConfig, EvalItem, JudgePolicy, ScoreScheme, StatementSource};
use entail_eval::statement::to_statement;
use entail_eval::stats::{corpus_bleu, rouge_l, rouge_n};
use entail_eval::{parallel, Error};

use crate::config::{self, FileConfig};

#[derive(Args)]
pub struct BackendFlags {
    /// TOML config file; explicit flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Backend identifier recorded in cache keys
    #[arg(long)]
    pub backend: Option<String>,
    /// Model name sent to the backend
    #[arg(long)]
    pub model: Option<String>,
    /// Sampling seed recorded in cache keys
    #[arg(long)]
    pub seed: Option<i64>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    /// Chat-completions endpoint URL
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Transcript cache file; created when missing, reused when present
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Answer purely from the cache; a missing transcript is an error
    #[arg(long)]
    pub replay_only: bool,
}

#[derive(Args)]
pub struct DatasetFlags {
    /// Dataset file, one JSON object per line
    #[arg(long)]
    pub dataset: PathBuf,
    /// Dataset layout: normalized | evouna
    #[arg(long, default_value = "normalized")]
    pub format: String,
    /// JSON file with the import field map (evouna layout)
    #[arg(long)]
    pub field_map: Option<PathBuf>,
    /// System names to import (evouna layout)
    #[arg(long, value_delimiter = ',')]
    pub systems: Vec<String>,
}

#[derive(Args)]
pub struct RunFlags {
    /// Judge policies: union, strict, or both
    #[arg(long)]
    pub policy: Option<String>,
    /// Comma-separated score schemes, or "all" / "none"
    #[arg(long)]
    pub schemes: Option<String>,
    /// Worker threads; 0 picks the library default
    #[arg(long)]
    pub workers: Option<usize>,
    /// Abort when more than this fraction of items fail
    #[arg(long)]
    pub failure_threshold: Option<f64>,
    /// Rate every rank with llm_direct, not only rank 3
    #[arg(long)]
    pub score_all_ranks: bool,
    /// AUROC population: rank3 | all
    #[arg(long)]
    pub auroc_population: Option<String>,
    /// Systems excluded from the ordering tests
    #[arg(long, value_delimiter = ',')]
    pub exclude_systems: Vec<String>,
}

#[derive(Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    #[command(flatten)]
    pub backend: BackendFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Output file (JSON lines); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    #[command(flatten)]
    pub backend: BackendFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Report file (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write per-item records as CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReliabilityArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    #[command(flatten)]
    pub backend: BackendFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Seeds to compare
    #[arg(long, value_delimiter = ',', default_values_t = [0i64, 1, 2, 3])]
    pub seeds: Vec<i64>,
    /// Report file (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct OrderingArgs {
    /// Existing evaluation report (JSON)
    #[arg(long)]
    pub report: PathBuf,
    /// Systems excluded from the ordering tests
    #[arg(long, value_delimiter = ',')]
    pub exclude_systems: Vec<String>,
    /// Output file (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PartialArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    #[command(flatten)]
    pub backend: BackendFlags,
    #[command(flatten)]
    pub run: RunFlags,
    /// Output file (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct MetricsArgs {
    /// Recompute the aggregate block of an existing report
    #[arg(long, conflicts_with_all = ["candidates", "references"])]
    pub report: Option<PathBuf>,
    /// Candidate sentences, one per line
    #[arg(long, requires = "references")]
    pub candidates: Option<PathBuf>,
    /// Reference sentences, line-aligned with the candidates
    #[arg(long, requires = "candidates")]
    pub references: Option<PathBuf>,
    /// Output file (JSON); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum CacheCommand {
    /// Rewrite a cache file sorted by key (canonical form)
    Export {
        /// Cache file to read
        #[arg(long)]
        cache: PathBuf,
        /// Destination file
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge transcripts from another cache file
    Import {
        /// Cache file to extend
        #[arg(long)]
        cache: PathBuf,
        /// Cache file to read transcripts from
        #[arg(long)]
        from: PathBuf,
    },
}

fn load_file_config(flags: &BackendFlags) -> anyhow::Result<FileConfig> {
    match &flags.config {
        Some(path) => config::load(path),
        None => Ok(FileConfig::default()),
    }
}

fn resolve_backend(flags: &BackendFlags, file: &FileConfig) -> BackendConfig {
    let mut config = BackendConfig::default();
    let section = &file.backend;
    if let Some(v) = &section.backend_id {
        config.backend_id = v.clone();
    }
    if let Some(v) = &section.model_name {
        config.model_name = v.clone();
    }
    if let Some(v) = section.seed {
        config.seed = v;
    }
    if let Some(v) = section.temperature {
        config.temperature = v;
    }
    if let Some(v) = section.max_tokens {
        config.max_tokens = v;
    }
    if let Some(v) = &section.endpoint {
        config.endpoint = v.clone();
    }
    if let Some(v) = &section.credentials_env {
        config.credentials_env = v.clone();
    }
    if let Some(v) = &flags.backend {
        config.backend_id = v.clone();
    }
    if let Some(v) = &flags.model {
        config.model_name = v.clone();
    }
    if let Some(v) = flags.seed {
        config.seed = v;
    }
    if let Some(v) = flags.temperature {
        config.temperature = v;
    }
    if let Some(v) = flags.max_tokens {
        config.max_tokens = v;
    }
    if let Some(v) = &flags.endpoint {
        config.endpoint = v.clone();
    }
    config
}

fn parse_policies(spec: &str) -> anyhow::Result<Vec<JudgePolicy>> {
    if spec.trim().eq_ignore_ascii_case("both") {
        return Ok(vec![JudgePolicy::Union, JudgePolicy::Strict]);
    }
    spec.split(',')
        .map(|p| p.parse::<JudgePolicy>().map_err(anyhow::Error::from))
        .collect()
}

fn parse_schemes(spec: &str) -> anyhow::Result<Vec<ScoreScheme>> {
    let trimmed = spec.trim();
    if trimmed.eq_ignore_ascii_case("all") {
        return Ok(ScoreScheme::ALL.to_vec());
    }
    if trimmed.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|s| s.parse::<ScoreScheme>().map_err(anyhow::Error::from))
        .collect()
}

fn resolve_run(flags: &RunFlags, file: &FileConfig) -> anyhow::Result<RunOptions> {
    let mut options = RunOptions::default();
    let section = &file.run;
    if let Some(policies) = &section.policies {
        options.policies = policies
            .iter()
            .map(|p| p.parse::<JudgePolicy>().map_err(anyhow::Error::from))
            .collect::<anyhow::Result<_>>()?;
    }
    if let Some(schemes) = &section.schemes {
        options.schemes = schemes
            .iter()
            .map(|s| s.parse::<ScoreScheme>().map_err(anyhow::Error::from))
            .collect::<anyhow::Result<_>>()?;
    }
    if let Some(v) = section.workers {
        options.workers = v;
    }
    if let Some(v) = section.failure_threshold {
        options.failure_threshold = v;
    }
    if let Some(v) = section.score_all_ranks {
        options.score_all_ranks = v;
    }
    if let Some(v) = &section.auroc_population {
        options.auroc_population = v.parse()?;
    }
    if let Some(v) = &section.exclude_systems {
        options.exclude_systems = v.clone();
    }
    if let Some(spec) = &flags.policy {
        options.policies = parse_policies(spec)?;
    }
    if let Some(spec) = &flags.schemes {
        options.schemes = parse_schemes(spec)?;
    }
    if let Some(v) = flags.workers {
        options.workers = v;
    }
    if let Some(v) = flags.failure_threshold {
        options.failure_threshold = v;
    }
    if flags.score_all_ranks {
        options.score_all_ranks = true;
    }
    if let Some(v) = &flags.auroc_population {
        options.auroc_population = v.parse()?;
    }
    if !flags.exclude_systems.is_empty() {
        options.exclude_systems = flags.exclude_systems.clone();
    }
    Ok(options)
}

fn build_gateway(config: &BackendConfig, flags: &BackendFlags) -> anyhow::Result<Gateway> {
    if flags.replay_only {
        let path = flags
            .cache
            .as_deref()
            .context("--replay-only requires --cache")?;
        let cache = TranscriptCache::load_read_only(path)?;
        return Ok(Gateway::replay_only(cache));
    }
    let cache = match flags.cache.as_deref() {
        Some(path) => TranscriptCache::open(path)?,
        None => TranscriptCache::in_memory(),
    };
    let backend = RemoteBackend::new(config, Duration::from_secs(60))?;
    Ok(Gateway::new(Box::new(backend), cache, GatewayOptions::default()))
}

fn load_items(flags: &DatasetFlags, max_invalid_fraction: f64) -> anyhow::Result<Vec<EvalItem>> {
    let format: DatasetFormat = flags.format.parse()?;
    let mut field_map: Option<FieldMap> = match &flags.field_map {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading field map {}", path.display()))?;
            Some(serde_json::from_str(&text)?)
        }
        None if format == DatasetFormat::EvounaImport => Some(FieldMap::default()),
        None => None,
    };
    if !flags.systems.is_empty() {
        if let Some(map) = field_map.as_mut() {
            map.systems = flags.systems.clone();
        }
    }
    let dataset = DatasetFile { path: flags.dataset.clone(), format, field_map };
    let ingested = ingest(&dataset, max_invalid_fraction)?;
    for error in &ingested.line_errors {
        eprintln!(
            "warning: {} line {}: {}",
            flags.dataset.display(),
            error.line,
            error.message
        );
    }
    Ok(ingested.items)
}

fn write_output(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> anyhow::Result<()> {
    let file = load_file_config(&args.backend)?;
    let config = resolve_backend(&args.backend, &file);
    let options = resolve_run(&args.run, &file)?;
    let items = load_items(&args.dataset, options.failure_threshold)?;
    let gateway = build_gateway(&config, &args.backend)?;
    let report = run_evaluate(&gateway, items, &config, &options)?;
    if let Some(path) = &args.csv {
        fs::write(path, report.to_csv()?)
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    write_output(&report.to_json()?, args.out.as_deref())
}

pub fn reliability(args: ReliabilityArgs) -> anyhow::Result<()> {
    let file = load_file_config(&args.backend)?;
    let config = resolve_backend(&args.backend, &file);
    let options = resolve_run(&args.run, &file)?;
    let items = load_items(&args.dataset, options.failure_threshold)?;
    let gateway = build_gateway(&config, &args.backend)?;
    let block = run_reliability(&gateway, &items, &config, &args.seeds, &options)?;
    let report =
        ReliabilityReport { config: report_config(&config, &options), reliability: block };
    write_output(&report.to_json()?, args.out.as_deref())
}

pub fn ordering(args: OrderingArgs) -> anyhow::Result<()> {
    let text = fs::read_to_string(&args.report)
        .with_context(|| format!("reading report {}", args.report.display()))?;
    let report = RunReport::from_json(&text)?;
    let block = ordering_from_report(&report, &args.exclude_systems)?;
    let out = OrderingReport { config: report.config, ordering: block };
    write_output(&out.to_json()?, args.out.as_deref())
}

/// The partial-marks view of an evaluated item.
#[derive(Serialize)]
struct PartialRow {
    id: String,
    system_name: String,
    rank: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    info_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumption_count: Option<usize>,
    scores: std::collections::BTreeMap<String, f64>,
}

pub fn partial(args: PartialArgs) -> anyhow::Result<()> {
    let file = load_file_config(&args.backend)?;
    let config = resolve_backend(&args.backend, &file);
    let options = resolve_run(&args.run, &file)?;
    let items = load_items(&args.dataset, options.failure_threshold)?;
    let gateway = build_gateway(&config, &args.backend)?;
    let report = run_evaluate(&gateway, items, &config, &options)?;
    let rows: Vec<PartialRow> = report
        .records
        .iter()
        .map(|r| PartialRow {
            id: r.id.clone(),
            system_name: r.system_name.clone(),
            rank: r.rank.level(),
            steps: r.explanation.as_ref().map(|e| e.steps),
            info_count: r.explanation.as_ref().map(|e| e.info_count),
            assumption_count: r.explanation.as_ref().map(|e| e.assumption_count),
            scores: r.scores.clone(),
        })
        .collect();
    write_output(&to_rounded_json(&rows)?, args.out.as_deref())
}

#[derive(Serialize)]
struct ConvertedStatement {
    id: String,
    system_name: String,
    source: StatementSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    gold_index: Option<usize>,
    text: String,
    transcript_key: String,
}

pub fn convert(args: ConvertArgs) -> anyhow::Result<()> {
    let file = load_file_config(&args.backend)?;
    let config = resolve_backend(&args.backend, &file);
    let options = resolve_run(&args.run, &file)?;
    let mut items = load_items(&args.dataset, options.failure_threshold)?;
    items.sort_by(|a, b| (&a.id, &a.system_name).cmp(&(&b.id, &b.system_name)));
    let gateway = build_gateway(&config, &args.backend)?;

    let results = parallel::map_items(items, options.workers, |item| {
        let mut rows = Vec::new();
        let (statement, key) = to_statement(
            &gateway,
            &item.question,
            &item.system_answer,
            StatementSource::System,
            &item.id,
            &config,
        )?;
        rows.push(ConvertedStatement {
            id: item.id.clone(),
            system_name: item.system_name.clone(),
            source: StatementSource::System,
            gold_index: None,
            text: statement.text,
            transcript_key: key,
        });
        for (index, gold) in item.gold_answers.iter().enumerate() {
            let (statement, key) = to_statement(
                &gateway,
                &item.question,
                gold,
                StatementSource::Gold,
                &item.id,
                &config,
            )?;
            rows.push(ConvertedStatement {
                id: item.id.clone(),
                system_name: item.system_name.clone(),
                source: StatementSource::Gold,
                gold_index: Some(index),
                text: statement.text,
                transcript_key: key,
            });
        }
        Ok::<_, Error>(rows)
    });

    let mut lines = String::new();
    for result in results {
        for row in result? {
            lines.push_str(&serde_json::to_string(&row)?);
            lines.push('\n');
        }
    }
    write_output(&lines, args.out.as_deref())
}

#[derive(Serialize)]
struct RougeBlock {
    precision: f64,
    recall: f64,
    f1: f64,
}

#[derive(Serialize)]
struct TextMetricsReport {
    n: usize,
    bleu: f64,
    rouge1: RougeBlock,
    rouge2: RougeBlock,
    rouge_l: RougeBlock,
}

fn read_lines(path: &Path) -> anyhow::Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_owned).collect())
}

fn mean_rouge<F>(candidates: &[String], references: &[String], score: F) -> anyhow::Result<RougeBlock>
where
    F: Fn(&str, &str) -> entail_eval::Result<entail_eval::stats::RougeScore>,
{
    let mut precision = 0.0;
    let mut recall = 0.0;
    let mut f1 = 0.0;
    for (candidate, reference) in candidates.iter().zip(references) {
        let s = score(candidate, reference)?;
        precision += s.precision;
        recall += s.recall;
        f1 += s.f1;
    }
    let n = candidates.len() as f64;
    Ok(RougeBlock { precision: precision / n, recall: recall / n, f1: f1 / n })
}

pub fn metrics(args: MetricsArgs) -> anyhow::Result<()> {
    if let Some(path) = &args.report {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading report {}", path.display()))?;
        let report = RunReport::from_json(&text)?;
        let aggregates = recompute_aggregates(&report)?;
        return write_output(&to_rounded_json(&aggregates)?, args.out.as_deref());
    }
    let (Some(candidates_path), Some(references_path)) = (&args.candidates, &args.references)
    else {
        bail!("pass either --report or both --candidates and --references");
    };
    let candidates = read_lines(candidates_path)?;
    let references = read_lines(references_path)?;
    if candidates.len() != references.len() {
        bail!(
            "line count mismatch: {} candidates vs {} references",
            candidates.len(),
            references.len()
        );
    }
    if candidates.is_empty() {
        bail!("no lines to score");
    }
    let report = TextMetricsReport {
        n: candidates.len(),
        bleu: corpus_bleu(&candidates, &references)?,
        rouge1: mean_rouge(&candidates, &references, |c, r| rouge_n(c, r, 1))?,
        rouge2: mean_rouge(&candidates, &references, |c, r| rouge_n(c, r, 2))?,
        rouge_l: mean_rouge(&candidates, &references, rouge_l)?,
    };
    write_output(&to_rounded_json(&report)?, args.out.as_deref())
}

pub fn cache(command: CacheCommand) -> anyhow::Result<()> {
    match command {
        CacheCommand::Export { cache, out } => {
            let store = TranscriptCache::load_read_only(&cache)?;
            let written = store.export(&out)?;
            eprintln!("exported {written} transcripts to {}", out.display());
        }
        CacheCommand::Import { cache, from } => {
            let store = TranscriptCache::open(&cache)?;
            let added = store.import(&from)?;
            eprintln!("imported {added} new transcripts into {}", cache.display());
        }
    }
    Ok(())
}
