//! Run report structures and their deterministic JSON/CSV serialization.
//!
//! Reports never carry timestamps, worker counts, or filesystem paths, and
//! every collection is sorted, so a fixed cache and config always produce
//! byte-identical output. Floats are rounded to 6 significant digits at
//! serialization time; values that can be non-finite (odds ratios, test
//! statistics) are stored as strings so JSON stays well-formed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::EvalRecord;

/// Round to 6 significant digits. Zero and non-finite values pass through.
///
/// Implemented as a scientific-notation round trip: both directions are
/// correctly rounded in the standard library, which avoids the overflow and
/// inexact-factor pitfalls of multiply-round-divide at extreme magnitudes.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().expect("scientific notation round-trips")
}

/// Render a possibly non-finite value for a report cell.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        "undefined".to_owned()
    } else if x == f64::INFINITY {
        "inf".to_owned()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{}", sig6(x))
    }
}

/// The configuration a run was produced under (credentials and endpoint
/// excluded; they do not affect results under a fixed cache).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub backend_id: String,
    pub model_name: String,
    pub seed: i64,
    pub temperature: f64,
    pub max_tokens: u32,
    pub policies: Vec<String>,
    pub schemes: Vec<String>,
    pub score_all_ranks: bool,
    pub auroc_population: String,
}

/// What was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub items: usize,
    /// Distinct system names, sorted.
    pub systems: Vec<String>,
}

/// One item that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub id: String,
    pub system_name: String,
    pub error_kind: String,
    pub message: String,
}

/// Binary agreement with human judgments for one predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyMetricsBlock {
    pub n: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

/// Mean of one scheme's raw scores over the items that received one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeAggregate {
    pub n: usize,
    pub mean: f64,
}

/// AUROC of one scheme against human judgments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AurocEntry {
    pub n_accepted: usize,
    pub n_rejected: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Corpus-level numbers recomputable from the per-item records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub items_total: usize,
    pub items_evaluated: usize,
    pub unevaluated: usize,
    /// Rank key (`rank1_sup_only`, ...) -> item count; zero counts included.
    pub hierarchy_counts: BTreeMap<String, usize>,
    /// Policy name -> agreement with human judgments (items with judgments).
    pub policy_metrics: BTreeMap<String, PolicyMetricsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexical_match: Option<PolicyMetricsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_f1_mean: Option<f64>,
    pub score_means: BTreeMap<String, SchemeAggregate>,
    pub auroc: BTreeMap<String, AurocEntry>,
}

/// One one-tailed Fisher comparison between adjacent hierarchy ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherTestBlock {
    pub comparison: String,
    /// `[[accepted_hi, rejected_hi], [accepted_lo, rejected_lo]]`.
    pub table: [[u64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    /// Sample odds ratio; a string because it can be "inf" or "undefined".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub odds_ratio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One Brunner-Munzel test of accepted vs rejected scores within rank 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmTestBlock {
    pub scheme: String,
    pub n_accepted: usize,
    pub n_rejected: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub df: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_effect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Ordering evidence: does the hierarchy order predict human acceptance?
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingBlock {
    pub excluded_systems: Vec<String>,
    /// Records with human judgments after exclusions.
    pub population: usize,
    pub fisher: Vec<FisherTestBlock>,
    pub brunner_munzel: Vec<BmTestBlock>,
}

/// Mean and sample standard deviation across seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanStdBlock {
    pub mean: f64,
    pub stdev: f64,
}

/// Cross-seed stability of the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBlock {
    pub seeds: Vec<i64>,
    /// Items successfully evaluated under every seed.
    pub items_compared: usize,
    /// Seed pair "a-b" -> Cohen's kappa over all directional labels.
    pub entailment_kappa: BTreeMap<String, f64>,
    /// Seed pair "a-b" -> Cohen's kappa over hierarchy ranks.
    pub rank_kappa: BTreeMap<String, f64>,
    /// Mean pairwise corpus BLEU between the seeds' statements.
    pub statement_bleu: f64,
    /// Mean pairwise exact-match rate between the seeds' statements.
    pub statement_exact_rate: f64,
    pub policy_f1: BTreeMap<String, MeanStdBlock>,
    pub policy_accuracy: BTreeMap<String, MeanStdBlock>,
}

/// Gateway traffic counters for the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStatsBlock {
    pub cache_hits: usize,
    pub backend_calls: usize,
}

/// Complete output of an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ReportConfig,
    pub dataset: DatasetSummary,
    pub aggregates: Aggregates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<OrderingBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliability: Option<ReliabilityBlock>,
    pub failures: Vec<ItemFailure>,
    pub cache_stats: CacheStatsBlock,
    pub records: Vec<EvalRecord>,
}

impl RunReport {
    /// Every item is accounted for: evaluated records (split across the four
    /// ranks) plus failures equal the input size.
    pub fn check_accounting(&self) -> Result<()> {
        let a = &self.aggregates;
        let rank_sum: usize = a.hierarchy_counts.values().sum();
        let consistent = rank_sum == a.items_evaluated
            && a.items_evaluated + a.unevaluated == a.items_total
            && self.records.len() == a.items_evaluated
            && self.failures.len() == a.unevaluated;
        if consistent {
            Ok(())
        } else {
            Err(Error::Run(format!(
                "accounting mismatch: ranks {} + unevaluated {} vs {} items ({} records, {} failures)",
                rank_sum,
                a.unevaluated,
                a.items_total,
                self.records.len(),
                self.failures.len()
            )))
        }
    }

    /// Deterministic pretty JSON with all floats rounded to 6 significant
    /// digits.
    pub fn to_json(&self) -> Result<String> {
        to_rounded_json(self)
    }

    pub fn from_json(text: &str) -> Result<RunReport> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-item CSV companion to the JSON report.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "id".to_owned(),
            "system_name".to_owned(),
            "rank".to_owned(),
            "in_sup".to_owned(),
            "in_inf".to_owned(),
            "human_judgment".to_owned(),
        ];
        for policy in &self.config.policies {
            header.push(format!("correct_{policy}"));
        }
        header.push("lexical_match".to_owned());
        header.push("token_f1".to_owned());
        for scheme in &self.config.schemes {
            header.push(format!("score_{scheme}"));
        }
        header.extend(["steps".to_owned(), "info_count".to_owned(), "assumption_count".to_owned()]);
        writer.write_record(&header).map_err(csv_error)?;

        let opt = |present: Option<String>| present.unwrap_or_default();
        for r in &self.records {
            let mut row = vec![
                r.id.clone(),
                r.system_name.clone(),
                r.rank.level().to_string(),
                r.in_sup.to_string(),
                r.in_inf.to_string(),
                opt(r.human_judgment.map(|j| j.to_string())),
            ];
            for policy in &self.config.policies {
                row.push(opt(r.judgments.get(policy).map(|c| c.to_string())));
            }
            row.push(r.lexical_match.to_string());
            row.push(fmt_sig6(r.token_f1));
            for scheme in &self.config.schemes {
                row.push(opt(r.scores.get(scheme).map(|v| fmt_sig6(*v))));
            }
            match &r.explanation {
                Some(e) => row.extend([
                    e.steps.to_string(),
                    e.info_count.to_string(),
                    e.assumption_count.to_string(),
                ]),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
            writer.write_record(&row).map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Run(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Run(e.to_string()))
    }
}

/// Output of the `reliability` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityReport {
    pub config: ReportConfig,
    pub reliability: ReliabilityBlock,
}

impl ReliabilityReport {
    pub fn to_json(&self) -> Result<String> {
        to_rounded_json(self)
    }
}

/// Output of the `ordering` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub config: ReportConfig,
    pub ordering: OrderingBlock,
}

impl OrderingReport {
    pub fn to_json(&self) -> Result<String> {
        to_rounded_json(self)
    }
}

/// Serialize any report value with rounded floats, sorted object keys, and
/// a trailing newline.
pub fn to_rounded_json<T: Serialize>(value: &T) -> Result<String> {
    let mut tree = serde_json::to_value(value)?;
    round_floats(&mut tree);
    let mut text = serde_json::to_string_pretty(&tree)?;
    text.push('\n');
    Ok(text)
}

fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let rounded = sig6(n.as_f64().expect("checked is_f64"));
                if let Some(replacement) = serde_json::Number::from_f64(rounded) {
                    *n = replacement;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Run(format!("csv serialization failed: {e}"))
}
