//! Core domain types: evaluation items, statements, entailment labels, the
//! four-level answer hierarchy, judgment policies and partial scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One QA evaluation unit: a question, its gold answers, and one system's
/// answer, optionally with a human correctness judgment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalItem {
    /// Stable identifier, unique together with `system_name`.
    pub id: String,
    pub question: String,
    /// Reference answers; never empty, entries non-empty after trimming.
    pub gold_answers: Vec<String>,
    /// Name of the answering system (model or retrieval pipeline).
    pub system_name: String,
    pub system_answer: String,
    /// Human acceptance of the system answer, when annotated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_judgment: Option<bool>,
}

impl EvalItem {
    /// Check the structural invariants. Ingestion rejects items that fail.
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::validation("item id is empty"));
        }
        if self.question.trim().is_empty() {
            return Err(Error::validation(format!("item {}: question is empty", self.id)));
        }
        if self.system_name.trim().is_empty() {
            return Err(Error::validation(format!("item {}: system_name is empty", self.id)));
        }
        if self.system_answer.trim().is_empty() {
            return Err(Error::validation(format!("item {}: system_answer is empty", self.id)));
        }
        if self.gold_answers.is_empty() {
            return Err(Error::validation(format!("item {}: no gold answers", self.id)));
        }
        if self.gold_answers.iter().any(|g| g.trim().is_empty()) {
            return Err(Error::validation(format!("item {}: empty gold answer", self.id)));
        }
        Ok(())
    }
}

/// Whether a statement was derived from a gold answer or a system answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementSource {
    Gold,
    System,
}

/// A declarative sentence produced from a question/answer pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub text: String,
    pub source: StatementSource,
    /// Id of the [`EvalItem`] this statement was derived for.
    pub origin_item: String,
}

/// Three-way NLI label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntailmentLabel {
    Entailment,
    Contradiction,
    Neutral,
}

impl EntailmentLabel {
    pub fn is_entailment(self) -> bool {
        self == EntailmentLabel::Entailment
    }
}

impl std::fmt::Display for EntailmentLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EntailmentLabel::Entailment => "entailment",
            EntailmentLabel::Contradiction => "contradiction",
            EntailmentLabel::Neutral => "neutral",
        };
        f.write_str(s)
    }
}

/// Both entailment directions between one gold statement and the system
/// statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionalEntailment {
    /// Label for "gold statement (premise) entails system statement".
    pub gold_entails_system: EntailmentLabel,
    /// Label for "system statement (premise) entails gold statement".
    pub system_entails_gold: EntailmentLabel,
}

/// The four-level answer hierarchy.
///
/// `in_sup` means the system statement entails at least one gold statement
/// (the answer carries at least the gold information); `in_inf` means at
/// least one gold statement entails the system statement (the answer is
/// implied by the gold).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HierarchyRank {
    /// Rank 1: in sup only — strictly more informative than the gold.
    SupOnly,
    /// Rank 2: in both — equivalent to the gold.
    Equivalent,
    /// Rank 3: in inf only — entailed by, but weaker than, the gold.
    InfOnly,
    /// Rank 4: in neither.
    Neither,
}

impl HierarchyRank {
    /// Map the two membership flags to a rank. Total: every combination has
    /// a defined rank.
    pub fn from_flags(in_sup: bool, in_inf: bool) -> HierarchyRank {
        match (in_sup, in_inf) {
            (true, false) => HierarchyRank::SupOnly,
            (true, true) => HierarchyRank::Equivalent,
            (false, true) => HierarchyRank::InfOnly,
            (false, false) => HierarchyRank::Neither,
        }
    }

    pub fn in_sup(self) -> bool {
        matches!(self, HierarchyRank::SupOnly | HierarchyRank::Equivalent)
    }

    pub fn in_inf(self) -> bool {
        matches!(self, HierarchyRank::Equivalent | HierarchyRank::InfOnly)
    }

    /// Numeric level, 1 (most informative) to 4 (incorrect).
    pub fn level(self) -> u8 {
        match self {
            HierarchyRank::SupOnly => 1,
            HierarchyRank::Equivalent => 2,
            HierarchyRank::InfOnly => 3,
            HierarchyRank::Neither => 4,
        }
    }
}

impl std::fmt::Display for HierarchyRank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.level())
    }
}

/// Which hierarchy ranks count as a correct answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JudgePolicy {
    /// Accept ranks 1-3 (anything entailment-related to the gold).
    Union,
    /// Accept ranks 1-2 only (at least as informative as the gold).
    Strict,
}

impl JudgePolicy {
    pub fn accepts(self, rank: HierarchyRank) -> bool {
        match self {
            JudgePolicy::Union => rank != HierarchyRank::Neither,
            JudgePolicy::Strict => matches!(rank, HierarchyRank::SupOnly | HierarchyRank::Equivalent),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            JudgePolicy::Union => "union",
            JudgePolicy::Strict => "strict",
        }
    }
}

impl std::str::FromStr for JudgePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<JudgePolicy> {
        match s.trim().to_lowercase().as_str() {
            "union" => Ok(JudgePolicy::Union),
            "strict" => Ok(JudgePolicy::Strict),
            other => Err(Error::Config(format!("unknown judge policy {other:?}"))),
        }
    }
}

/// A binary correctness decision for one item under one policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub rank: HierarchyRank,
    pub policy: JudgePolicy,
    pub correct: bool,
}

/// A parsed inference explanation: numbered deduction steps plus counts of
/// `[[INFO]]` and `[[ASSUMPTION]]` markers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceExplanation {
    /// The explanation exactly as returned by the model.
    pub raw_text: String,
    /// Step bodies in order, numbering prefix removed.
    pub steps: Vec<String>,
    pub info_count: usize,
    pub assumption_count: usize,
}

/// Partial-mark schemes for rank-3 (and optionally other) answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreScheme {
    /// Penalize steps, extra info and assumptions: -10/step, -3/INFO, -5/ASSUMPTION.
    Cia,
    /// Penalize steps only: -10/step.
    C,
    /// Penalize extra info and assumptions only: -3/INFO, -5/ASSUMPTION.
    Ia,
    /// 1-5 inference difficulty rated by the LLM after explaining (1 = very easy).
    InferenceLlm,
    /// 1-5 direct correctness score from the LLM (5 = completely right).
    LlmDirect,
    /// Token-level F1 between system answer and best gold answer.
    TokenF1,
}

impl ScoreScheme {
    pub const ALL: [ScoreScheme; 6] = [
        ScoreScheme::Cia,
        ScoreScheme::C,
        ScoreScheme::Ia,
        ScoreScheme::InferenceLlm,
        ScoreScheme::LlmDirect,
        ScoreScheme::TokenF1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoreScheme::Cia => "cia",
            ScoreScheme::C => "c",
            ScoreScheme::Ia => "ia",
            ScoreScheme::InferenceLlm => "inference_llm",
            ScoreScheme::LlmDirect => "llm_direct",
            ScoreScheme::TokenF1 => "token_f1",
        }
    }

    /// Whether larger raw values mean a better answer. The inference
    /// difficulty rating is the one scheme where larger means worse, so
    /// ranking-based aggregation (AUROC, ordering tests) negates it.
    pub fn higher_is_better(self) -> bool {
        !matches!(self, ScoreScheme::InferenceLlm)
    }

    /// Value to use wherever scores are compared across items: identical to
    /// the raw value except for difficulty ratings, which are negated.
    pub fn oriented(self, value: f64) -> f64 {
        if self.higher_is_better() {
            value
        } else {
            -value
        }
    }
}

impl std::str::FromStr for ScoreScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScoreScheme> {
        match s.trim().to_lowercase().replace('-', "_").as_str() {
            "cia" => Ok(ScoreScheme::Cia),
            "c" => Ok(ScoreScheme::C),
            "ia" => Ok(ScoreScheme::Ia),
            "inference_llm" => Ok(ScoreScheme::InferenceLlm),
            "llm_direct" => Ok(ScoreScheme::LlmDirect),
            "token_f1" => Ok(ScoreScheme::TokenF1),
            other => Err(Error::Config(format!("unknown score scheme {other:?}"))),
        }
    }
}

impl std::fmt::Display for ScoreScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One partial mark for one item.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialScore {
    pub scheme: ScoreScheme,
    /// Raw scheme value. Heuristic schemes yield non-positive penalties,
    /// LLM schemes integers in 1..=5, token F1 a value in [0, 1].
    pub value: f64,
}

/// Connection and sampling settings for an LLM backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    /// Short label identifying the backend implementation; part of cache keys.
    pub backend_id: String,
    pub model_name: String,
    pub seed: i64,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Chat-completions endpoint URL.
    pub endpoint: String,
    /// Name of the environment variable holding the bearer token.
    pub credentials_env: String,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            backend_id: "openai".to_owned(),
            model_name: "gpt-3.5-turbo-1106".to_owned(),
            seed: 42,
            temperature: 0.0,
            max_tokens: 300,
            endpoint: "https://api.openai.com/v1/chat/completions".to_owned(),
            credentials_env: "ENTAIL_EVAL_API_KEY".to_owned(),
        }
    }
}

impl BackendConfig {
    /// Copy of `self` with a different sampling seed (used by reliability runs).
    pub fn with_seed(&self, seed: i64) -> BackendConfig {
        BackendConfig { seed, ..self.clone() }
    }
}

/// Parsed explanation summary carried in an [`EvalRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationSummary {
    pub steps: usize,
    pub info_count: usize,
    pub assumption_count: usize,
}

/// Full per-item evaluation outcome, serializable into run reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    pub system_name: String,
    pub question: String,
    pub gold_answers: Vec<String>,
    pub system_answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_judgment: Option<bool>,
    pub system_statement: String,
    /// One converted statement per gold answer, same order as `gold_answers`.
    pub gold_statements: Vec<String>,
    /// One directional pair per gold answer, same order as `gold_answers`.
    pub entailments: Vec<DirectionalEntailment>,
    pub in_sup: bool,
    pub in_inf: bool,
    pub rank: HierarchyRank,
    /// Policy name -> binary correctness.
    pub judgments: std::collections::BTreeMap<String, bool>,
    pub lexical_match: bool,
    pub token_f1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<ExplanationSummary>,
    /// Scheme name -> raw partial score.
    pub scores: std::collections::BTreeMap<String, f64>,
    /// Transcript cache keys of every LLM call behind this record, sorted.
    pub transcript_keys: Vec<String>,
    /// Non-fatal anomalies observed while evaluating this item.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EvalRecord {
    /// Invariants that hold for every completed record.
    pub fn validate(&self) -> Result<()> {
        if self.gold_statements.len() != self.gold_answers.len() {
            return Err(Error::validation(format!(
                "record {}: {} gold statements for {} gold answers",
                self.id,
                self.gold_statements.len(),
                self.gold_answers.len()
            )));
        }
        if self.entailments.len() != self.gold_answers.len() {
            return Err(Error::validation(format!(
                "record {}: {} entailment pairs for {} gold answers",
                self.id,
                self.entailments.len(),
                self.gold_answers.len()
            )));
        }
        if HierarchyRank::from_flags(self.in_sup, self.in_inf) != self.rank {
            return Err(Error::validation(format!(
                "record {}: rank {} inconsistent with flags", self.id, self.rank
            )));
        }
        if self.transcript_keys.is_empty() {
            return Err(Error::validation(format!(
                "record {}: no transcript keys for LLM-derived fields",
                self.id
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item() -> EvalItem {
        EvalItem {
            id: "q1".into(),
            question: "where is the tv show the curse of oak island filmed".into(),
            gold_answers: vec!["Oak Island".into()],
            system_name: "chatgpt".into(),
            system_answer: "Nova Scotia, Canada".into(),
            human_judgment: Some(true),
        }
    }

    #[test]
    fn valid_item_passes() {
        assert!(item().validate().is_ok());
    }

    #[test]
    fn invalid_items_are_rejected() {
        let mut bad = item();
        bad.id = "  ".into();
        assert!(bad.validate().is_err());

        let mut bad = item();
        bad.gold_answers.clear();
        assert!(bad.validate().is_err());

        let mut bad = item();
        bad.gold_answers = vec!["".into()];
        assert!(bad.validate().is_err());

        let mut bad = item();
        bad.question = String::new();
        assert!(bad.validate().is_err());

        let mut bad = item();
        bad.system_answer = " \t".into();
        assert!(bad.validate().is_err());

        let mut bad = item();
        bad.system_name = String::new();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rank_from_flags_covers_all_combinations() {
        assert_eq!(HierarchyRank::from_flags(true, false), HierarchyRank::SupOnly);
        assert_eq!(HierarchyRank::from_flags(true, true), HierarchyRank::Equivalent);
        assert_eq!(HierarchyRank::from_flags(false, true), HierarchyRank::InfOnly);
        assert_eq!(HierarchyRank::from_flags(false, false), HierarchyRank::Neither);
    }

    #[test]
    fn rank_flags_round_trip() {
        for rank in [
            HierarchyRank::SupOnly,
            HierarchyRank::Equivalent,
            HierarchyRank::InfOnly,
            HierarchyRank::Neither,
        ] {
            assert_eq!(HierarchyRank::from_flags(rank.in_sup(), rank.in_inf()), rank);
        }
    }

    #[test]
    fn levels_are_one_to_four() {
        assert_eq!(HierarchyRank::SupOnly.level(), 1);
        assert_eq!(HierarchyRank::Equivalent.level(), 2);
        assert_eq!(HierarchyRank::InfOnly.level(), 3);
        assert_eq!(HierarchyRank::Neither.level(), 4);
    }

    #[test]
    fn union_accepts_ranks_one_to_three() {
        assert!(JudgePolicy::Union.accepts(HierarchyRank::SupOnly));
        assert!(JudgePolicy::Union.accepts(HierarchyRank::Equivalent));
        assert!(JudgePolicy::Union.accepts(HierarchyRank::InfOnly));
        assert!(!JudgePolicy::Union.accepts(HierarchyRank::Neither));
    }

    #[test]
    fn strict_accepts_ranks_one_and_two() {
        assert!(JudgePolicy::Strict.accepts(HierarchyRank::SupOnly));
        assert!(JudgePolicy::Strict.accepts(HierarchyRank::Equivalent));
        assert!(!JudgePolicy::Strict.accepts(HierarchyRank::InfOnly));
        assert!(!JudgePolicy::Strict.accepts(HierarchyRank::Neither));
    }

    #[test]
    fn strict_acceptance_implies_union_acceptance() {
        for rank in [
            HierarchyRank::SupOnly,
            HierarchyRank::Equivalent,
            HierarchyRank::InfOnly,
            HierarchyRank::Neither,
        ] {
            if JudgePolicy::Strict.accepts(rank) {
                assert!(JudgePolicy::Union.accepts(rank));
            }
        }
    }

    #[test]
    fn policy_and_scheme_names_parse_back() {
        for p in [JudgePolicy::Union, JudgePolicy::Strict] {
            assert_eq!(p.name().parse::<JudgePolicy>().unwrap(), p);
        }
        for s in ScoreScheme::ALL {
            assert_eq!(s.name().parse::<ScoreScheme>().unwrap(), s);
        }
        // Hyphenated CLI spellings are accepted too.
        assert_eq!("inference-llm".parse::<ScoreScheme>().unwrap(), ScoreScheme::InferenceLlm);
        assert_eq!("token-f1".parse::<ScoreScheme>().unwrap(), ScoreScheme::TokenF1);
        assert!("bogus".parse::<ScoreScheme>().is_err());
        assert!("bogus".parse::<JudgePolicy>().is_err());
    }

    #[test]
    fn difficulty_scheme_is_oriented_by_negation() {
        assert_eq!(ScoreScheme::InferenceLlm.oriented(4.0), -4.0);
        assert_eq!(ScoreScheme::Cia.oriented(-33.0), -33.0);
        assert_eq!(ScoreScheme::LlmDirect.oriented(5.0), 5.0);
    }

    #[test]
    fn backend_defaults_match_reference_settings() {
        let c = BackendConfig::default();
        assert_eq!(c.model_name, "gpt-3.5-turbo-1106");
        assert_eq!(c.seed, 42);
        assert_eq!(c.temperature, 0.0);
        assert_eq!(c.max_tokens, 300);
        assert_eq!(c.credentials_env, "ENTAIL_EVAL_API_KEY");
    }

    #[test]
    fn config_serde_round_trips_and_fills_defaults() {
        let json = r#"{"model_name":"other-model","seed":7}"#;
        let c: BackendConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.model_name, "other-model");
        assert_eq!(c.seed, 7);
        assert_eq!(c.max_tokens, 300);
        let back = serde_json::to_string(&c).unwrap();
        let c2: BackendConfig = serde_json::from_str(&back).unwrap();
        assert_eq!(c, c2);
    }
}
