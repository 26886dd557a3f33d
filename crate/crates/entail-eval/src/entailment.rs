//! Bidirectional entailment tests, multi-gold aggregation into the answer
//! hierarchy, binary judging, and the lexical baselines.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gateway::{ChatMessage, ChatRequest, Gateway};
use crate::model::{
    BackendConfig, DirectionalEntailment, EntailmentLabel, EvalItem, HierarchyRank, JudgePolicy,
    Judgment, Statement, StatementSource,
};
use crate::statement::to_statement;
use crate::text::{contains_subsequence, normalize, qa_tokens};

/// Three-way NLI prompt. The quotation marks around the label words are
/// typographic (U+201C/U+201D) on purpose — they are part of the exact
/// prompt and of every cache key.
pub const ENTAILMENT_PROMPT_TEMPLATE: &str = "Please identify whether the premise entails or contradicts the hypothesis in the following premise and hypothesis. The answer should be exact \u{201c}entailment\u{201d}, \u{201c}contradiction\u{201d}, or \u{201c}neutral\u{201d}. Provide only the answer from the three options. Do not provide explanations.

Premise: {premise}
Hypothesis: {hypothesis}

Is it entailment, contradiction, or neutral?";

/// Render the entailment prompt for one directed pair.
pub fn entailment_prompt(premise: &str, hypothesis: &str) -> String {
    ENTAILMENT_PROMPT_TEMPLATE
        .replacen("{premise}", premise, 1)
        .replacen("{hypothesis}", hypothesis, 1)
}

/// Build the gateway request for one directed entailment test.
pub fn entailment_request(premise: &str, hypothesis: &str, config: &BackendConfig) -> ChatRequest {
    ChatRequest::from_config(config, vec![ChatMessage::user(entailment_prompt(premise, hypothesis))])
}

/// A parsed label together with the raw response it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelParse {
    pub raw: String,
    pub label: EntailmentLabel,
}

/// Parse a three-way label from a backend response.
///
/// The response is lowercased and stripped of punctuation; it is accepted
/// if it then equals one of the three keywords, or if exactly one distinct
/// keyword occurs somewhere in it. Zero or several distinct keywords fail
/// the parse — coercing unparseable output to Neutral would silently bias
/// hierarchy membership.
pub fn parse_label(raw: &str) -> Result<LabelParse> {
    const KEYWORDS: [(&str, EntailmentLabel); 3] = [
        ("entailment", EntailmentLabel::Entailment),
        ("contradiction", EntailmentLabel::Contradiction),
        ("neutral", EntailmentLabel::Neutral),
    ];
    let cleaned = normalize(raw);
    let cleaned = cleaned.trim();
    for (kw, label) in KEYWORDS {
        if cleaned == kw {
            return Ok(LabelParse { raw: raw.to_owned(), label });
        }
    }
    let found: Vec<EntailmentLabel> = KEYWORDS
        .iter()
        .filter(|(kw, _)| cleaned.contains(kw))
        .map(|&(_, label)| label)
        .collect();
    match found.as_slice() {
        [label] => Ok(LabelParse { raw: raw.to_owned(), label: *label }),
        _ => Err(Error::LabelParse(raw.to_owned())),
    }
}

/// Run one directed entailment test through the gateway.
///
/// Returns the label and the transcript cache key of the call.
pub fn entails(
    gateway: &Gateway,
    premise: &Statement,
    hypothesis: &Statement,
    config: &BackendConfig,
) -> Result<(EntailmentLabel, String)> {
    if premise.text.trim().is_empty() || hypothesis.text.trim().is_empty() {
        return Err(Error::Validation("entails needs non-empty statements".into()));
    }
    let request = entailment_request(&premise.text, &hypothesis.text, config);
    let completion = gateway.complete(&request)?;
    let parsed = parse_label(&completion.text)?;
    Ok((parsed.label, completion.key))
}

/// Everything `classify` learns about one item.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub system_statement: Statement,
    /// One statement per gold answer, in gold order.
    pub gold_statements: Vec<Statement>,
    /// One directional pair per gold answer, in gold order.
    pub entailments: Vec<DirectionalEntailment>,
    pub in_sup: bool,
    pub in_inf: bool,
    pub rank: HierarchyRank,
    /// Sorted, deduplicated transcript keys of every LLM call involved.
    pub transcript_keys: Vec<String>,
}

/// Convert statements and run all `|golds| * 2` directional tests, then
/// place the answer in the hierarchy.
///
/// `in_sup` is true iff the system statement entails at least one gold
/// statement; `in_inf` iff at least one gold statement entails the system
/// statement (any-gold aggregation in both directions, so the result does
/// not depend on gold order).
pub fn classify(
    gateway: &Gateway,
    item: &EvalItem,
    config: &BackendConfig,
) -> Result<Classification> {
    item.validate()?;
    let mut keys = BTreeSet::new();

    let (system_statement, key) = to_statement(
        gateway,
        &item.question,
        &item.system_answer,
        StatementSource::System,
        &item.id,
        config,
    )?;
    keys.insert(key);

    let mut gold_statements = Vec::with_capacity(item.gold_answers.len());
    for gold in &item.gold_answers {
        let (s, key) =
            to_statement(gateway, &item.question, gold, StatementSource::Gold, &item.id, config)?;
        keys.insert(key);
        gold_statements.push(s);
    }

    let mut entailments = Vec::with_capacity(gold_statements.len());
    for gold in &gold_statements {
        let (gold_entails_system, key) = entails(gateway, gold, &system_statement, config)?;
        keys.insert(key);
        let (system_entails_gold, key) = entails(gateway, &system_statement, gold, config)?;
        keys.insert(key);
        entailments.push(DirectionalEntailment { gold_entails_system, system_entails_gold });
    }

    let in_sup = entailments.iter().any(|e| e.system_entails_gold.is_entailment());
    let in_inf = entailments.iter().any(|e| e.gold_entails_system.is_entailment());
    Ok(Classification {
        system_statement,
        gold_statements,
        entailments,
        in_sup,
        in_inf,
        rank: HierarchyRank::from_flags(in_sup, in_inf),
        transcript_keys: keys.into_iter().collect(),
    })
}

/// Apply a policy to a rank.
pub fn judge(rank: HierarchyRank, policy: JudgePolicy) -> Judgment {
    Judgment { rank, policy, correct: policy.accepts(rank) }
}

/// Lexical-match baseline: true iff some normalized gold answer occurs as a
/// contiguous token subsequence of the normalized system answer.
pub fn lexical_match(system_answer: &str, gold_answers: &[String]) -> bool {
    let sys = qa_tokens(system_answer);
    gold_answers.iter().any(|g| contains_subsequence(&sys, &qa_tokens(g)))
}

/// Token-F1 baseline: max over golds of the harmonic mean of token
/// precision and recall under multiset overlap.
pub fn token_f1(system_answer: &str, gold_answers: &[String]) -> f64 {
    let sys = qa_tokens(system_answer);
    gold_answers
        .iter()
        .map(|g| pair_f1(&sys, &qa_tokens(g)))
        .fold(0.0, f64::max)
}

fn pair_f1(sys: &[String], gold: &[String]) -> f64 {
    if sys.is_empty() || gold.is_empty() {
        // Both empty: vacuous perfect match; one empty: no overlap.
        return if sys.is_empty() && gold.is_empty() { 1.0 } else { 0.0 };
    }
    let mut gold_counts = std::collections::HashMap::new();
    for t in gold {
        *gold_counts.entry(t.as_str()).or_insert(0usize) += 1;
    }
    let mut overlap = 0usize;
    for t in sys {
        if let Some(c) = gold_counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return 0.0;
    }
    let precision = overlap as f64 / sys.len() as f64;
    let recall = overlap as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{GatewayOptions, ScriptedBackend, TranscriptCache};

    #[test]
    fn prompt_is_rendered_with_typographic_quotes() {
        let p = entailment_prompt("P.", "H.");
        assert!(p.contains("exact \u{201c}entailment\u{201d}, \u{201c}contradiction\u{201d}, or \u{201c}neutral\u{201d}"));
        assert!(p.contains("\nPremise: P.\nHypothesis: H.\n"));
        assert!(p.ends_with("Is it entailment, contradiction, or neutral?"));
    }

    #[test]
    fn labels_parse_from_clean_and_noisy_responses() {
        assert_eq!(parse_label("entailment").unwrap().label, EntailmentLabel::Entailment);
        assert_eq!(parse_label("Entailment.").unwrap().label, EntailmentLabel::Entailment);
        assert_eq!(parse_label("\u{201c}neutral\u{201d}").unwrap().label, EntailmentLabel::Neutral);
        assert_eq!(parse_label(" CONTRADICTION \n").unwrap().label, EntailmentLabel::Contradiction);
        assert_eq!(
            parse_label("The answer is neutral").unwrap().label,
            EntailmentLabel::Neutral
        );
    }

    #[test]
    fn ambiguous_or_absent_labels_fail_the_parse() {
        assert!(matches!(parse_label("maybe"), Err(Error::LabelParse(_))));
        assert!(matches!(parse_label(""), Err(Error::LabelParse(_))));
        assert!(matches!(
            parse_label("entailment or neutral, hard to say"),
            Err(Error::LabelParse(_))
        ));
    }

    #[test]
    fn entailment_contains_no_false_substring_traps() {
        // "entails" is not the keyword "entailment"; must fail.
        assert!(parse_label("the premise entails it").is_err());
    }

    /// Scripted NLI oracle for tests: maps (premise, hypothesis) pairs it
    /// recognizes to fixed labels, everything else is unscripted.
    fn nli_gateway(rules: Vec<((String, String), &'static str)>) -> Gateway {
        let backend = ScriptedBackend::from_fn("nli", move |req| {
            let prompt = &req.messages.last()?.content;
            if let Some(rest) = prompt.split("Premise: ").nth(1) {
                let premise = rest.lines().next()?;
                let hypothesis = rest.split("Hypothesis: ").nth(1)?.lines().next()?;
                for ((p, h), label) in &rules {
                    if p == premise && h == hypothesis {
                        return Some(label.to_string());
                    }
                }
                // identical texts entail themselves; keeps scripts short
                if premise == hypothesis {
                    return Some("entailment".into());
                }
                return Some("neutral".into());
            }
            // QA2D request: echo the answer as a trivially declarative form
            // (the query's A: line is the third one, after two exemplars)
            let answer = prompt.split("\nA: ").nth(3)?.lines().next()?;
            Some(format!("Statement about {answer}."))
        });
        Gateway::new(Box::new(backend), TranscriptCache::in_memory(), GatewayOptions::default())
    }

    fn item(golds: &[&str], answer: &str) -> EvalItem {
        EvalItem {
            id: "q1".into(),
            question: "what is it".into(),
            gold_answers: golds.iter().map(|s| s.to_string()).collect(),
            system_name: "sys".into(),
            system_answer: answer.into(),
            human_judgment: None,
        }
    }

    #[test]
    fn classify_identical_answer_is_rank_two() {
        let gw = nli_gateway(vec![]);
        let config = BackendConfig::default();
        let c = classify(&gw, &item(&["X"], "X"), &config).unwrap();
        assert_eq!(c.rank, HierarchyRank::Equivalent);
        assert!(c.in_sup && c.in_inf);
        // one QA2D transcript (shared) + one entailment transcript (p == h)
        assert_eq!(c.transcript_keys.len(), 2);
    }

    #[test]
    fn classify_any_gold_aggregation_rank_one() {
        // golds {X, Y}; system entails only Y; neither gold entails system.
        let rules = vec![
            (("Statement about Z.".to_string(), "Statement about Y.".to_string()), "entailment"),
        ];
        let gw = nli_gateway(rules);
        let config = BackendConfig::default();
        let c = classify(&gw, &item(&["X", "Y"], "Z"), &config).unwrap();
        assert_eq!(c.rank, HierarchyRank::SupOnly);
        assert!(c.in_sup && !c.in_inf);
        assert_eq!(c.entailments.len(), 2);
    }

    #[test]
    fn classify_is_invariant_to_gold_order() {
        let rules = vec![
            (("Statement about Z.".to_string(), "Statement about Y.".to_string()), "entailment"),
            (("Statement about X.".to_string(), "Statement about Z.".to_string()), "entailment"),
        ];
        let gw = nli_gateway(rules.clone());
        let config = BackendConfig::default();
        let a = classify(&gw, &item(&["X", "Y"], "Z"), &config).unwrap();
        let gw = nli_gateway(rules);
        let b = classify(&gw, &item(&["Y", "X"], "Z"), &config).unwrap();
        assert_eq!(a.rank, b.rank);
        assert_eq!((a.in_sup, a.in_inf), (b.in_sup, b.in_inf));
        assert_eq!(a.rank, HierarchyRank::Equivalent);
    }

    #[test]
    fn label_combinations_map_to_the_four_ranks() {
        // For a single gold: (gold->sys, sys->gold) in {E,C,N}^2 must land
        // on exactly the documented rank.
        let labels = ["entailment", "contradiction", "neutral"];
        for g2s in labels {
            for s2g in labels {
                let rules = vec![
                    (("Statement about G.".to_string(), "Statement about S.".to_string()), g2s),
                    (("Statement about S.".to_string(), "Statement about G.".to_string()), s2g),
                ];
                let gw = nli_gateway(rules);
                let config = BackendConfig::default();
                let c = classify(&gw, &item(&["G"], "S"), &config).unwrap();
                let expected = match (s2g == "entailment", g2s == "entailment") {
                    (true, true) => HierarchyRank::Equivalent,
                    (true, false) => HierarchyRank::SupOnly,
                    (false, true) => HierarchyRank::InfOnly,
                    (false, false) => HierarchyRank::Neither,
                };
                assert_eq!(c.rank, expected, "labels ({g2s}, {s2g})");
            }
        }
    }

    #[test]
    fn unparseable_label_fails_classification() {
        let rules = vec![
            (("Statement about G.".to_string(), "Statement about S.".to_string()), "who knows"),
        ];
        let gw = nli_gateway(rules);
        let config = BackendConfig::default();
        assert!(matches!(
            classify(&gw, &item(&["G"], "S"), &config),
            Err(Error::LabelParse(_))
        ));
    }

    #[test]
    fn judge_matches_policy_tables() {
        assert!(judge(HierarchyRank::InfOnly, JudgePolicy::Union).correct);
        assert!(!judge(HierarchyRank::InfOnly, JudgePolicy::Strict).correct);
        assert!(!judge(HierarchyRank::Neither, JudgePolicy::Union).correct);
        assert!(judge(HierarchyRank::SupOnly, JudgePolicy::Strict).correct);
        for rank in [
            HierarchyRank::SupOnly,
            HierarchyRank::Equivalent,
            HierarchyRank::InfOnly,
            HierarchyRank::Neither,
        ] {
            let j = judge(rank, JudgePolicy::Union);
            assert_eq!(j.rank, rank);
            assert_eq!(j.policy, JudgePolicy::Union);
        }
    }

    fn golds(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn lexical_match_examples() {
        assert!(lexical_match("Oak Island", &golds(&["Oak Island"])));
        assert!(lexical_match(
            "on Oak Island, a small island off the coast of Nova Scotia, Canada",
            &golds(&["Oak Island"])
        ));
        assert!(!lexical_match("Nova Scotia, Canada", &golds(&["Oak Island"])));
        // articles are dropped before matching
        assert!(lexical_match("the duodenum", &golds(&["duodenum"])));
        // subsequence must be contiguous
        assert!(!lexical_match("Oak the great Island", &golds(&["Oak Island"])));
        // any gold suffices
        assert!(lexical_match("Sydney", &golds(&["Canberra", "Sydney"])));
    }

    #[test]
    fn token_f1_examples() {
        assert_eq!(token_f1("Oak Island", &golds(&["Oak Island"])), 1.0);
        assert_eq!(token_f1("Nova Scotia, Canada", &golds(&["Oak Island"])), 0.0);
        let f1 = token_f1(
            "on Oak Island, a small island off the coast of Nova Scotia, Canada",
            &golds(&["Oak Island"]),
        );
        assert!((f1 - 4.0 / 13.0).abs() < 1e-15, "got {f1}");
    }

    #[test]
    fn token_f1_multiset_and_multi_gold() {
        // multiset overlap: "x x y" vs "x y y" -> overlap {x, y} = 2,
        // P = R = 2/3.
        let f1 = token_f1("x x y", &golds(&["x y y"]));
        assert!((f1 - 2.0 / 3.0).abs() < 1e-15);
        // best gold wins
        let f1 = token_f1("Bonnie Tyler", &golds(&["Gaynor Hopkins", "Bonnie Tyler"]));
        assert_eq!(f1, 1.0);
    }

    #[test]
    fn lexical_match_implies_positive_token_f1() {
        let cases = [
            ("Oak Island", vec!["Oak Island".to_string()]),
            ("on Oak Island, off the coast", vec!["Oak Island".to_string()]),
            ("the duodenum", vec!["duodenum".to_string()]),
        ];
        for (sys, gs) in cases {
            if lexical_match(sys, &gs) {
                assert!(token_f1(sys, &gs) > 0.0);
            }
        }
    }

    #[test]
    fn token_f1_handles_empty_normalizations() {
        // "The a an" normalizes to nothing; gold does too.
        assert_eq!(token_f1("the a an", &golds(&["a the"])), 1.0);
        assert_eq!(token_f1("the a an", &golds(&["substance"])), 0.0);
        assert_eq!(token_f1("substance", &golds(&["the"])), 0.0);
    }
}
