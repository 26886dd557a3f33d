//! Run orchestration: the per-item evaluation pipeline, corpus aggregation,
//! the rank-ordering significance tests, and the cross-seed reliability
//! study.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::entailment::{classify, judge, lexical_match, token_f1};
use crate::error::{Error, Result};
use crate::gateway::Gateway;
use crate::harness::report::{
    fmt_sig6, Aggregates, AurocEntry, BmTestBlock, CacheStatsBlock, DatasetSummary,
    FisherTestBlock, ItemFailure, MeanStdBlock, OrderingBlock, PolicyMetricsBlock,
    ReliabilityBlock, ReportConfig, RunReport, SchemeAggregate,
};
use crate::model::{
    BackendConfig, EntailmentLabel, EvalItem, EvalRecord, ExplanationSummary, HierarchyRank,
    JudgePolicy, ScoreScheme,
};
use crate::parallel;
use crate::partial::{explain, llm_score_direct, llm_score_from_explanation, score_heuristic};
use crate::statement::statement_agreement;
use crate::stats::{
    auroc, binary_f1_accuracy, brunner_munzel_one_sided, cohen_kappa, fisher_exact_one_tailed,
    mean_and_stdev, BinaryMetrics,
};

/// Which items feed the per-scheme AUROC.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AurocPopulation {
    /// Only rank-3 answers (where all schemes are defined).
    Rank3,
    /// Every answer that received a score under the scheme.
    AllScored,
}

impl AurocPopulation {
    pub fn name(self) -> &'static str {
        match self {
            AurocPopulation::Rank3 => "rank3",
            AurocPopulation::AllScored => "all_scored",
        }
    }
}

impl std::str::FromStr for AurocPopulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<AurocPopulation> {
        match s.trim().to_lowercase().replace('-', "_").as_str() {
            "rank3" | "rank_3" => Ok(AurocPopulation::Rank3),
            "all" | "all_scored" => Ok(AurocPopulation::AllScored),
            other => Err(Error::Config(format!("unknown AUROC population {other:?}"))),
        }
    }
}

/// Seeds used by the reliability study when none are given.
pub const DEFAULT_RELIABILITY_SEEDS: [i64; 4] = [0, 1, 2, 3];

/// Knobs for an evaluation run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub policies: Vec<JudgePolicy>,
    pub schemes: Vec<ScoreScheme>,
    /// Worker threads for the item fan-out; 0 picks the library default.
    pub workers: usize,
    /// Abort when more than this fraction of items fail.
    pub failure_threshold: f64,
    /// Score every rank with `llm_direct` instead of only rank 3.
    pub score_all_ranks: bool,
    pub auroc_population: AurocPopulation,
    /// Systems left out of the ordering tests.
    pub exclude_systems: Vec<String>,
    /// Attach the ordering block when human judgments are present.
    pub ordering: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            policies: vec![JudgePolicy::Union, JudgePolicy::Strict],
            schemes: ScoreScheme::ALL.to_vec(),
            workers: 0,
            failure_threshold: 0.10,
            score_all_ranks: false,
            auroc_population: AurocPopulation::Rank3,
            exclude_systems: Vec::new(),
            ordering: true,
        }
    }
}

impl RunOptions {
    fn validate(&self) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::Config("no judge policies selected".into()));
        }
        if !(0.0..=1.0).contains(&self.failure_threshold) {
            return Err(Error::Config(format!(
                "failure_threshold must be within [0, 1], got {}",
                self.failure_threshold
            )));
        }
        let mut seen_policies = HashSet::new();
        if !self.policies.iter().all(|p| seen_policies.insert(*p)) {
            return Err(Error::Config("duplicate judge policy".into()));
        }
        let mut seen_schemes = HashSet::new();
        if !self.schemes.iter().all(|s| seen_schemes.insert(*s)) {
            return Err(Error::Config("duplicate score scheme".into()));
        }
        Ok(())
    }

    fn wants_heuristics(&self) -> bool {
        self.schemes
            .iter()
            .any(|s| matches!(s, ScoreScheme::Cia | ScoreScheme::C | ScoreScheme::Ia))
    }
}

/// The configuration block embedded in every report.
pub fn report_config(config: &BackendConfig, options: &RunOptions) -> ReportConfig {
    ReportConfig {
        backend_id: config.backend_id.clone(),
        model_name: config.model_name.clone(),
        seed: config.seed,
        temperature: config.temperature,
        max_tokens: config.max_tokens,
        policies: options.policies.iter().map(|p| p.name().to_owned()).collect(),
        schemes: options.schemes.iter().map(|s| s.name().to_owned()).collect(),
        score_all_ranks: options.score_all_ranks,
        auroc_population: options.auroc_population.name().to_owned(),
    }
}

/// Run the full pipeline for one item: statements, bidirectional
/// entailment, rank, judgments, baselines, and applicable partial scores.
pub fn evaluate_item(
    gateway: &Gateway,
    item: &EvalItem,
    config: &BackendConfig,
    options: &RunOptions,
) -> Result<EvalRecord> {
    let c = classify(gateway, item, config)?;
    let mut keys: BTreeSet<String> = c.transcript_keys.iter().cloned().collect();
    let mut warnings = Vec::new();

    let mut judgments = BTreeMap::new();
    for &policy in &options.policies {
        judgments.insert(policy.name().to_owned(), judge(c.rank, policy).correct);
    }

    let lexical = lexical_match(&item.system_answer, &item.gold_answers);
    let tf1 = token_f1(&item.system_answer, &item.gold_answers);

    let mut scores: BTreeMap<String, f64> = BTreeMap::new();
    if options.schemes.contains(&ScoreScheme::TokenF1) {
        scores.insert(ScoreScheme::TokenF1.name().to_owned(), tf1);
    }

    let heuristic_schemes = [ScoreScheme::Cia, ScoreScheme::C, ScoreScheme::Ia];
    let mut explanation = None;
    match c.rank {
        HierarchyRank::InfOnly => {
            if options.wants_heuristics() || options.schemes.contains(&ScoreScheme::InferenceLlm) {
                let witness = c
                    .entailments
                    .iter()
                    .position(|e| e.gold_entails_system.is_entailment())
                    .expect("rank 3 guarantees an entailing gold statement");
                let explained =
                    explain(gateway, &c.gold_statements[witness], &c.system_statement, config)?;
                keys.insert(explained.key.clone());
                warnings.extend(explained.warnings.iter().map(|w| format!("explanation: {w}")));
                explanation = Some(ExplanationSummary {
                    steps: explained.explanation.steps.len(),
                    info_count: explained.explanation.info_count,
                    assumption_count: explained.explanation.assumption_count,
                });
                for scheme in heuristic_schemes {
                    if options.schemes.contains(&scheme) {
                        let score = score_heuristic(&explained.explanation, scheme)?;
                        scores.insert(scheme.name().to_owned(), score.value);
                    }
                }
                if options.schemes.contains(&ScoreScheme::InferenceLlm) {
                    let (rating, key) = llm_score_from_explanation(gateway, &explained, config)?;
                    keys.insert(key);
                    scores.insert(ScoreScheme::InferenceLlm.name().to_owned(), f64::from(rating));
                }
            }
        }
        HierarchyRank::Equivalent => {
            // an equivalent answer needs no inference: zero penalty, no call
            for scheme in heuristic_schemes {
                if options.schemes.contains(&scheme) {
                    scores.insert(scheme.name().to_owned(), 0.0);
                }
            }
        }
        HierarchyRank::SupOnly | HierarchyRank::Neither => {}
    }

    if options.schemes.contains(&ScoreScheme::LlmDirect)
        && (c.rank == HierarchyRank::InfOnly || options.score_all_ranks)
    {
        let (rating, key) = llm_score_direct(gateway, item, config)?;
        keys.insert(key);
        scores.insert(ScoreScheme::LlmDirect.name().to_owned(), f64::from(rating));
    }

    let record = EvalRecord {
        id: item.id.clone(),
        system_name: item.system_name.clone(),
        question: item.question.clone(),
        gold_answers: item.gold_answers.clone(),
        system_answer: item.system_answer.clone(),
        human_judgment: item.human_judgment,
        system_statement: c.system_statement.text,
        gold_statements: c.gold_statements.into_iter().map(|s| s.text).collect(),
        entailments: c.entailments,
        in_sup: c.in_sup,
        in_inf: c.in_inf,
        rank: c.rank,
        judgments,
        lexical_match: lexical,
        token_f1: tf1,
        explanation,
        scores,
        transcript_keys: keys.into_iter().collect(),
        warnings,
    };
    record.validate()?;
    Ok(record)
}

/// Evaluate a dataset and build the full report.
///
/// Item failures are recorded, not fatal, unless their fraction exceeds
/// `options.failure_threshold`. Results are sorted by (id, system_name),
/// so the report does not depend on input order or worker count.
pub fn run_evaluate(
    gateway: &Gateway,
    items: Vec<EvalItem>,
    config: &BackendConfig,
    options: &RunOptions,
) -> Result<RunReport> {
    options.validate()?;
    if items.is_empty() {
        return Err(Error::InvalidInput("no items to evaluate".into()));
    }
    let mut seen = HashSet::new();
    let mut systems = BTreeSet::new();
    for item in &items {
        item.validate()?;
        if !seen.insert((item.id.clone(), item.system_name.clone())) {
            return Err(Error::InvalidInput(format!(
                "duplicate item id {:?} for system {:?}",
                item.id, item.system_name
            )));
        }
        systems.insert(item.system_name.clone());
    }
    let items_total = items.len();

    let results = parallel::map_items(items, options.workers, |item| {
        let outcome = evaluate_item(gateway, &item, config, options);
        (item, outcome)
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (item, outcome) in results {
        match outcome {
            Ok(record) => records.push(record),
            Err(e) => failures.push(ItemFailure {
                id: item.id,
                system_name: item.system_name,
                error_kind: e.kind().to_owned(),
                message: e.to_string(),
            }),
        }
    }
    let failure_fraction = failures.len() as f64 / items_total as f64;
    if failure_fraction > options.failure_threshold {
        return Err(Error::Run(format!(
            "{} of {items_total} items failed, over the {:.0}% threshold; first: {} ({}): {}",
            failures.len(),
            options.failure_threshold * 100.0,
            failures[0].id,
            failures[0].system_name,
            failures[0].message
        )));
    }
    records.sort_by(|a, b| (&a.id, &a.system_name).cmp(&(&b.id, &b.system_name)));
    failures.sort_by(|a, b| (&a.id, &a.system_name).cmp(&(&b.id, &b.system_name)));

    let aggregates = build_aggregates(&records, items_total, failures.len(), options)?;
    let ordering = if options.ordering && records.iter().any(|r| r.human_judgment.is_some()) {
        Some(run_ordering_tests(&records, &options.schemes, &options.exclude_systems))
    } else {
        None
    };
    let stats = gateway.stats();

    let report = RunReport {
        config: report_config(config, options),
        dataset: DatasetSummary { items: items_total, systems: systems.into_iter().collect() },
        aggregates,
        ordering,
        reliability: None,
        failures,
        cache_stats: CacheStatsBlock {
            cache_hits: stats.cache_hits,
            backend_calls: stats.backend_calls,
        },
        records,
    };
    report.check_accounting()?;
    Ok(report)
}

fn rank_key(rank: HierarchyRank) -> &'static str {
    match rank {
        HierarchyRank::SupOnly => "rank1_sup_only",
        HierarchyRank::Equivalent => "rank2_equivalent",
        HierarchyRank::InfOnly => "rank3_inf_only",
        HierarchyRank::Neither => "rank4_neither",
    }
}

fn metrics_block(metrics: BinaryMetrics, n: usize) -> PolicyMetricsBlock {
    PolicyMetricsBlock {
        n,
        tp: metrics.tp,
        fp: metrics.fp,
        fn_: metrics.fn_,
        tn: metrics.tn,
        precision: metrics.precision,
        recall: metrics.recall,
        f1: metrics.f1,
        accuracy: metrics.accuracy,
    }
}

fn build_aggregates(
    records: &[EvalRecord],
    items_total: usize,
    unevaluated: usize,
    options: &RunOptions,
) -> Result<Aggregates> {
    let mut hierarchy_counts: BTreeMap<String, usize> = [
        HierarchyRank::SupOnly,
        HierarchyRank::Equivalent,
        HierarchyRank::InfOnly,
        HierarchyRank::Neither,
    ]
    .into_iter()
    .map(|rank| (rank_key(rank).to_owned(), 0))
    .collect();
    for record in records {
        *hierarchy_counts.get_mut(rank_key(record.rank)).expect("all ranks keyed") += 1;
    }

    let judged: Vec<&EvalRecord> = records.iter().filter(|r| r.human_judgment.is_some()).collect();
    let reference: Vec<bool> = judged.iter().map(|r| r.human_judgment.expect("filtered")).collect();

    let mut policy_metrics = BTreeMap::new();
    let mut lexical = None;
    if !judged.is_empty() {
        for &policy in &options.policies {
            let predicted: Vec<bool> = judged
                .iter()
                .map(|r| {
                    r.judgments
                        .get(policy.name())
                        .copied()
                        // judgments are pure functions of the rank, so a
                        // record from an older run can be re-judged here
                        .unwrap_or_else(|| policy.accepts(r.rank))
                })
                .collect();
            let metrics = binary_f1_accuracy(&predicted, &reference)?;
            policy_metrics.insert(policy.name().to_owned(), metrics_block(metrics, judged.len()));
        }
        let predicted: Vec<bool> = judged.iter().map(|r| r.lexical_match).collect();
        lexical = Some(metrics_block(binary_f1_accuracy(&predicted, &reference)?, judged.len()));
    }

    let token_f1_mean = if records.is_empty() {
        None
    } else {
        Some(records.iter().map(|r| r.token_f1).sum::<f64>() / records.len() as f64)
    };

    let mut score_means = BTreeMap::new();
    let mut auroc_map = BTreeMap::new();
    for &scheme in &options.schemes {
        let values: Vec<f64> =
            records.iter().filter_map(|r| r.scores.get(scheme.name()).copied()).collect();
        if !values.is_empty() {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            score_means
                .insert(scheme.name().to_owned(), SchemeAggregate { n: values.len(), mean });
        }

        let mut scored = Vec::new();
        let mut labels = Vec::new();
        for record in records {
            let Some(human) = record.human_judgment else { continue };
            if options.auroc_population == AurocPopulation::Rank3
                && record.rank != HierarchyRank::InfOnly
            {
                continue;
            }
            if let Some(&value) = record.scores.get(scheme.name()) {
                scored.push(scheme.oriented(value));
                labels.push(human);
            }
        }
        let n_accepted = labels.iter().filter(|&&l| l).count();
        let n_rejected = labels.len() - n_accepted;
        let mut entry = AurocEntry { n_accepted, n_rejected, value: None, note: None };
        if labels.is_empty() {
            entry.note = Some("skipped: no scored items with human judgments".to_owned());
        } else {
            match auroc(&scored, &labels) {
                Ok(value) => entry.value = Some(value),
                Err(e) => entry.note = Some(format!("skipped: {e}")),
            }
        }
        auroc_map.insert(scheme.name().to_owned(), entry);
    }

    Ok(Aggregates {
        items_total,
        items_evaluated: records.len(),
        unevaluated,
        hierarchy_counts,
        policy_metrics,
        lexical_match: lexical,
        token_f1_mean,
        score_means,
        auroc: auroc_map,
    })
}

/// Recompute the aggregate block from a report's per-item records; every
/// reported number must be reproducible this way.
pub fn recompute_aggregates(report: &RunReport) -> Result<Aggregates> {
    let options = options_from_report_config(&report.config)?;
    build_aggregates(
        &report.records,
        report.aggregates.items_total,
        report.aggregates.unevaluated,
        &options,
    )
}

fn options_from_report_config(config: &ReportConfig) -> Result<RunOptions> {
    Ok(RunOptions {
        policies: config.policies.iter().map(|p| p.parse()).collect::<Result<Vec<_>>>()?,
        schemes: config.schemes.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?,
        score_all_ranks: config.score_all_ranks,
        auroc_population: config.auroc_population.parse()?,
        ..RunOptions::default()
    })
}

/// Test whether the hierarchy order predicts human acceptance: one-tailed
/// Fisher tests between adjacent ranks, and Brunner-Munzel tests of
/// accepted vs rejected scores within rank 3 for each scheme.
pub fn run_ordering_tests(
    records: &[EvalRecord],
    schemes: &[ScoreScheme],
    exclude_systems: &[String],
) -> OrderingBlock {
    let considered: Vec<&EvalRecord> = records
        .iter()
        .filter(|r| r.human_judgment.is_some() && !exclude_systems.contains(&r.system_name))
        .collect();

    // acceptance counts per rank level 1..=4
    let mut counts = [(0u64, 0u64); 5];
    for record in &considered {
        let level = record.rank.level() as usize;
        match record.human_judgment {
            Some(true) => counts[level].0 += 1,
            Some(false) => counts[level].1 += 1,
            None => unreachable!("filtered to judged records"),
        }
    }

    let mut fisher = Vec::new();
    for (hi, lo) in [(1usize, 2usize), (2, 3), (3, 4)] {
        let (accepted_hi, rejected_hi) = counts[hi];
        let (accepted_lo, rejected_lo) = counts[lo];
        let table = [[accepted_hi, rejected_hi], [accepted_lo, rejected_lo]];
        let mut block = FisherTestBlock {
            comparison: format!("rank{hi}_vs_rank{lo}"),
            table,
            p_value: None,
            odds_ratio: None,
            note: None,
        };
        if accepted_hi + rejected_hi == 0 || accepted_lo + rejected_lo == 0 {
            block.note = Some("skipped: empty rank group".to_owned());
        } else {
            match fisher_exact_one_tailed(table) {
                Ok(result) => {
                    block.p_value = Some(result.p_value);
                    block.odds_ratio = Some(fmt_sig6(result.odds_ratio));
                }
                Err(e) => block.note = Some(format!("skipped: {e}")),
            }
        }
        fisher.push(block);
    }

    let mut brunner_munzel = Vec::new();
    for &scheme in schemes {
        let mut accepted = Vec::new();
        let mut rejected = Vec::new();
        for record in &considered {
            if record.rank != HierarchyRank::InfOnly {
                continue;
            }
            if let Some(&value) = record.scores.get(scheme.name()) {
                let oriented = scheme.oriented(value);
                match record.human_judgment {
                    Some(true) => accepted.push(oriented),
                    Some(false) => rejected.push(oriented),
                    None => unreachable!("filtered to judged records"),
                }
            }
        }
        let mut block = BmTestBlock {
            scheme: scheme.name().to_owned(),
            n_accepted: accepted.len(),
            n_rejected: rejected.len(),
            statistic: None,
            df: None,
            p_value: None,
            relative_effect: None,
            note: None,
        };
        if accepted.len() < 2 || rejected.len() < 2 {
            block.note = Some("skipped: needs at least 2 scores in each group".to_owned());
        } else {
            // H1: accepted answers score stochastically larger
            match brunner_munzel_one_sided(&rejected, &accepted) {
                Ok(result) => {
                    block.statistic = Some(fmt_sig6(result.statistic));
                    block.df = Some(fmt_sig6(result.df));
                    block.p_value = Some(result.p_value);
                    block.relative_effect = Some(result.relative_effect);
                }
                Err(e) => block.note = Some(format!("skipped: {e}")),
            }
        }
        brunner_munzel.push(block);
    }

    let mut excluded: Vec<String> = exclude_systems.to_vec();
    excluded.sort();
    excluded.dedup();
    OrderingBlock { excluded_systems: excluded, population: considered.len(), fisher, brunner_munzel }
}

/// Re-run the ordering tests of an existing report, optionally excluding
/// systems.
pub fn ordering_from_report(
    report: &RunReport,
    exclude_systems: &[String],
) -> Result<OrderingBlock> {
    let schemes: Vec<ScoreScheme> =
        report.config.schemes.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?;
    Ok(run_ordering_tests(&report.records, &schemes, exclude_systems))
}

/// Run the pipeline once per seed and measure cross-seed agreement.
///
/// Reports pairwise Cohen's kappa over directional entailment labels and
/// over hierarchy ranks, statement agreement (mean pairwise BLEU and
/// exact-match rate), and mean +/- stdev of each policy's F1/accuracy,
/// all over the items that evaluated successfully under every seed.
pub fn run_reliability(
    gateway: &Gateway,
    items: &[EvalItem],
    config: &BackendConfig,
    seeds: &[i64],
    options: &RunOptions,
) -> Result<ReliabilityBlock> {
    if seeds.len() < 2 {
        return Err(Error::Config(format!(
            "reliability needs at least 2 seeds, got {}",
            seeds.len()
        )));
    }
    let mut unique = HashSet::new();
    if !seeds.iter().all(|s| unique.insert(*s)) {
        return Err(Error::Config("duplicate seed in reliability run".into()));
    }

    let mut per_seed_options = options.clone();
    per_seed_options.ordering = false;
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        runs.push(run_evaluate(gateway, items.to_vec(), &config.with_seed(seed), &per_seed_options)?);
    }

    let mut common: BTreeSet<(String, String)> = runs[0]
        .records
        .iter()
        .map(|r| (r.id.clone(), r.system_name.clone()))
        .collect();
    for run in &runs[1..] {
        let here: BTreeSet<(String, String)> =
            run.records.iter().map(|r| (r.id.clone(), r.system_name.clone())).collect();
        common = common.intersection(&here).cloned().collect();
    }
    if common.is_empty() {
        return Err(Error::Run("no item evaluated successfully under every seed".into()));
    }

    // records are sorted by (id, system_name), so filtering to the common
    // set aligns them index-by-index across seeds
    let aligned: Vec<Vec<&EvalRecord>> = runs
        .iter()
        .map(|run| {
            run.records
                .iter()
                .filter(|r| common.contains(&(r.id.clone(), r.system_name.clone())))
                .collect()
        })
        .collect();

    let mut entailment_kappa = BTreeMap::new();
    let mut rank_kappa = BTreeMap::new();
    for i in 0..seeds.len() {
        for j in (i + 1)..seeds.len() {
            let key = format!("{}-{}", seeds[i], seeds[j]);
            let (labels_i, ranks_i) = flatten_outcomes(&aligned[i]);
            let (labels_j, ranks_j) = flatten_outcomes(&aligned[j]);
            entailment_kappa.insert(key.clone(), cohen_kappa(&labels_i, &labels_j)?);
            rank_kappa.insert(key, cohen_kappa(&ranks_i, &ranks_j)?);
        }
    }

    let statement_runs: Vec<Vec<String>> = aligned
        .iter()
        .map(|records| {
            records
                .iter()
                .flat_map(|r| {
                    r.gold_statements
                        .iter()
                        .cloned()
                        .chain(std::iter::once(r.system_statement.clone()))
                })
                .collect()
        })
        .collect();
    let (statement_bleu, statement_exact_rate) = statement_agreement(&statement_runs)?;

    let mut policy_f1 = BTreeMap::new();
    let mut policy_accuracy = BTreeMap::new();
    let judged_any = aligned[0].iter().any(|r| r.human_judgment.is_some());
    if judged_any {
        for &policy in &options.policies {
            let mut f1s = Vec::with_capacity(seeds.len());
            let mut accuracies = Vec::with_capacity(seeds.len());
            for records in &aligned {
                let judged: Vec<&&EvalRecord> =
                    records.iter().filter(|r| r.human_judgment.is_some()).collect();
                let predicted: Vec<bool> = judged
                    .iter()
                    .map(|r| {
                        r.judgments.get(policy.name()).copied().unwrap_or_else(|| policy.accepts(r.rank))
                    })
                    .collect();
                let reference: Vec<bool> =
                    judged.iter().map(|r| r.human_judgment.expect("filtered")).collect();
                let metrics = binary_f1_accuracy(&predicted, &reference)?;
                f1s.push(metrics.f1);
                accuracies.push(metrics.accuracy);
            }
            let (mean, stdev) = mean_and_stdev(&f1s)?;
            policy_f1.insert(policy.name().to_owned(), MeanStdBlock { mean, stdev });
            let (mean, stdev) = mean_and_stdev(&accuracies)?;
            policy_accuracy.insert(policy.name().to_owned(), MeanStdBlock { mean, stdev });
        }
    }

    Ok(ReliabilityBlock {
        seeds: seeds.to_vec(),
        items_compared: common.len(),
        entailment_kappa,
        rank_kappa,
        statement_bleu,
        statement_exact_rate,
        policy_f1,
        policy_accuracy,
    })
}

/// Flatten one seed's records into comparable label and rank sequences.
/// Order: records sorted by (id, system), labels per gold answer as
/// (gold entails system, system entails gold).
fn flatten_outcomes(records: &[&EvalRecord]) -> (Vec<EntailmentLabel>, Vec<HierarchyRank>) {
    let mut labels = Vec::new();
    let mut ranks = Vec::new();
    for record in records {
        for pair in &record.entailments {
            labels.push(pair.gold_entails_system);
            labels.push(pair.system_entails_gold);
        }
        ranks.push(record.rank);
    }
    (labels, ranks)
}
