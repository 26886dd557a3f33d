//! QA2D: convert a (question, answer) pair into a declarative statement
//! with a two-shot prompt, plus cross-run statement agreement metrics.

use crate::error::{Error, Result};
use crate::gateway::{ChatMessage, ChatRequest, Gateway};
use crate::model::{BackendConfig, Statement, StatementSource};
use crate::stats::corpus_bleu;

/// Two-shot conversion prompt. The exemplar wording, line breaks and the
/// missing final period on the second exemplar are deliberate; changing a
/// byte changes every cache key downstream.
pub const QA2D_PROMPT_TEMPLATE: &str = "Convert a question answer pair to a declarative statement, following these two examples:
Q: where is the tv show the curse of oak island filmed
A: Oak Island
S: The TV show the Curse of Oak Island is filmed on Oak Island.

Q: who wrote the first declaration of human rights
A: Cyrus
S: Cyrus wrote the first declaration of human rights

Do not provide explanations. Provide the statement only. Follow the above examples and convert this pair:
Q: {question}
A: {answer}
S:";

/// Render the QA2D prompt for one pair.
pub fn qa2d_prompt(question: &str, answer: &str) -> String {
    QA2D_PROMPT_TEMPLATE
        .replacen("{question}", question, 1)
        .replacen("{answer}", answer, 1)
}

/// Build the gateway request for one conversion.
pub fn qa2d_request(question: &str, answer: &str, config: &BackendConfig) -> ChatRequest {
    ChatRequest::from_config(config, vec![ChatMessage::user(qa2d_prompt(question, answer))])
}

/// Reduce a backend response to a single statement line: trim, and if the
/// response spans several lines keep the first non-empty one. Guards
/// against chatty backends that ignore "Provide the statement only".
fn first_non_empty_line(response: &str) -> Option<String> {
    response.lines().map(str::trim).find(|l| !l.is_empty()).map(str::to_owned)
}

/// Convert a question/answer pair into a declarative [`Statement`].
///
/// Returns the statement plus the transcript cache key of the conversion
/// call, so records can point back at their evidence.
pub fn to_statement(
    gateway: &Gateway,
    question: &str,
    answer: &str,
    source: StatementSource,
    origin_item: &str,
    config: &BackendConfig,
) -> Result<(Statement, String)> {
    if question.trim().is_empty() || answer.trim().is_empty() {
        return Err(Error::Validation("to_statement needs a non-empty question and answer".into()));
    }
    let request = qa2d_request(question, answer, config);
    let completion = gateway.complete(&request)?;
    let text = first_non_empty_line(&completion.text).ok_or(Error::EmptyResponse)?;
    Ok((Statement { text, source, origin_item: origin_item.to_owned() }, completion.key))
}

/// Agreement between statement lists produced by different runs (seeds):
/// mean pairwise corpus BLEU and mean pairwise exact-match rate.
///
/// All runs must be aligned: same number of statements, same item order.
/// Exact match compares statements after whitespace trim only — no case
/// folding — to keep the measurement strict.
pub fn statement_agreement(runs: &[Vec<String>]) -> Result<(f64, f64)> {
    if runs.len() < 2 {
        return Err(Error::Alignment(format!("need at least 2 runs, got {}", runs.len())));
    }
    let len = runs[0].len();
    if len == 0 {
        return Err(Error::Alignment("runs contain no statements".into()));
    }
    for (i, run) in runs.iter().enumerate() {
        if run.len() != len {
            return Err(Error::Alignment(format!(
                "run 0 has {len} statements but run {i} has {}",
                run.len()
            )));
        }
    }

    let mut bleu_sum = 0.0;
    let mut exact_sum = 0.0;
    let mut pairs = 0usize;
    for i in 0..runs.len() {
        for j in 0..runs.len() {
            if i == j {
                continue;
            }
            bleu_sum += corpus_bleu(&runs[i], &runs[j])?;
            let matches = runs[i]
                .iter()
                .zip(&runs[j])
                .filter(|(a, b)| a.trim() == b.trim())
                .count();
            exact_sum += matches as f64 / len as f64;
            pairs += 1;
        }
    }
    Ok((bleu_sum / pairs as f64, exact_sum / pairs as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{ScriptedBackend, GatewayOptions, TranscriptCache};

    #[test]
    fn prompt_substitutes_each_placeholder_once() {
        let p = qa2d_prompt("where is fe best absorbed in the body", "in the duodenum");
        assert!(p.starts_with("Convert a question answer pair to a declarative statement"));
        assert!(p.contains("Q: where is fe best absorbed in the body\nA: in the duodenum\nS:"));
        assert!(!p.contains("{question}"));
        assert!(!p.contains("{answer}"));
        // the two exemplars stay intact
        assert!(p.contains("S: The TV show the Curse of Oak Island is filmed on Oak Island.\n"));
        assert!(p.contains("S: Cyrus wrote the first declaration of human rights\n"));
        assert!(p.ends_with("S:"));
    }

    #[test]
    fn prompt_survives_braces_in_the_answer() {
        let p = qa2d_prompt("what does {x} mean", "a placeholder {answer}");
        assert!(p.contains("Q: what does {x} mean"));
        assert!(p.contains("A: a placeholder {answer}"));
    }

    fn scripted_gateway(response: &'static str) -> Gateway {
        let backend = ScriptedBackend::from_fn("scripted", move |_req| Some(response.to_string()));
        Gateway::new(Box::new(backend), TranscriptCache::in_memory(), GatewayOptions::default())
    }

    #[test]
    fn to_statement_trims_and_keeps_first_line() {
        let gw = scripted_gateway("  The TV show the Curse of Oak Island is filmed on Oak Island.  \nExtra chatter.");
        let config = BackendConfig::default();
        let (s, key) = to_statement(
            &gw,
            "where is the tv show the curse of oak island filmed",
            "Oak Island",
            StatementSource::Gold,
            "q1",
            &config,
        )
        .unwrap();
        assert_eq!(s.text, "The TV show the Curse of Oak Island is filmed on Oak Island.");
        assert_eq!(s.source, StatementSource::Gold);
        assert_eq!(s.origin_item, "q1");
        assert_eq!(key.len(), 64);
    }

    #[test]
    fn to_statement_skips_leading_blank_lines() {
        let gw = scripted_gateway("\n\n  Cyrus wrote the first declaration of human rights\n");
        let config = BackendConfig::default();
        let (s, _) = to_statement(
            &gw,
            "who wrote the first declaration of human rights",
            "Cyrus",
            StatementSource::System,
            "q2",
            &config,
        )
        .unwrap();
        assert_eq!(s.text, "Cyrus wrote the first declaration of human rights");
    }

    #[test]
    fn to_statement_rejects_empty_inputs() {
        let gw = scripted_gateway("whatever");
        let config = BackendConfig::default();
        assert!(to_statement(&gw, "", "x", StatementSource::Gold, "q", &config).is_err());
        assert!(to_statement(&gw, "x", "  ", StatementSource::Gold, "q", &config).is_err());
    }

    fn run(statements: &[&str]) -> Vec<String> {
        statements.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_runs_agree_perfectly() {
        let a = run(&["The cat sat.", "Dogs run."]);
        let (bleu, exact) = statement_agreement(&[a.clone(), a]).unwrap();
        assert_eq!(bleu, 100.0);
        assert_eq!(exact, 1.0);
    }

    #[test]
    fn one_of_three_items_differing_gives_two_thirds() {
        let a = run(&["Alpha beta gamma.", "Delta epsilon.", "Zeta eta theta."]);
        let mut b = a.clone();
        b[1] = "Something else entirely.".into();
        let (_, exact) = statement_agreement(&[a, b]).unwrap();
        assert!((exact - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn completely_different_runs_have_zero_exact_rate() {
        let a = run(&["alpha beta", "gamma delta"]);
        let b = run(&["epsilon zeta", "eta theta"]);
        let (bleu, exact) = statement_agreement(&[a, b]).unwrap();
        assert_eq!(exact, 0.0);
        assert_eq!(bleu, 0.0);
    }

    #[test]
    fn agreement_is_symmetric_in_run_order() {
        let a = run(&["the cat sat on the mat", "dogs run fast"]);
        let b = run(&["the cat sat on a mat", "dogs run very fast"]);
        let ab = statement_agreement(&[a.clone(), b.clone()]).unwrap();
        let ba = statement_agreement(&[b, a]).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn exact_match_trims_whitespace_but_keeps_case() {
        let a = run(&["The Answer."]);
        let b = run(&["  The Answer. "]);
        let (_, exact) = statement_agreement(&[a, b]).unwrap();
        assert_eq!(exact, 1.0);
        let c = run(&["the answer."]);
        let (_, exact) = statement_agreement(&[run(&["The Answer."]), c]).unwrap();
        assert_eq!(exact, 0.0);
    }

    #[test]
    fn misaligned_runs_are_rejected() {
        let a = run(&["one", "two"]);
        let b = run(&["one"]);
        assert!(matches!(statement_agreement(&[a.clone(), b]), Err(Error::Alignment(_))));
        assert!(matches!(statement_agreement(&[a]), Err(Error::Alignment(_))));
        assert!(matches!(statement_agreement(&[run(&[]), run(&[])]), Err(Error::Alignment(_))));
    }
}
