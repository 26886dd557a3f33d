//! Partial marks for answers that are entailed by a gold answer but do not
//! entail one back: explanation generation, heuristic penalty scores, and
//! the two LLM rating variants.

use crate::error::{Error, Result};
use crate::gateway::{ChatMessage, ChatRequest, Gateway};
use crate::model::{BackendConfig, EvalItem, InferenceExplanation, PartialScore, ScoreScheme, Statement};

/// Asks for a numbered reasoning chain from S1 (gold) to S2 (system), with
/// `[[INFO]]` / `[[ASSUMPTION]]` markers on steps that need outside
/// information or assumptions.
pub const EXPLAIN_PROMPT_TEMPLATE: &str = "We have two statements S1 (the premise) and S2 (the hypothesis). S1 entails S2.

S1: {s1}
S2: {s2}
Now, list the reasoning process step by step to show how S2 can be deduced from S1.
List the steps as numbered statements, starting from 1.
If a step involves information not mentioned in S1 and S2, append [[INFO]] after the step.
If an assumption must be made to deduce S2 from S1, append [[ASSUMPTION]] after the step.
Provide the reasoning steps only. Do not include any other information.";

/// Follow-up sent in the same conversation as the explanation, asking for a
/// 1–5 difficulty rating (1 = very easy, 5 = very hard — higher is worse).
pub const RATE_PROMPT: &str = "Based on the reasoning steps, rate how hard it is to deduce S2 from S1.
1: Very easy
2: Easy
3: Neither easy nor hard
4: Hard
5: Very hard
Consider how many assumptions are needed, how much information is needed, and how much reasoning is needed.
Return a number from 1 to 5 only. Do not include any other information.";

/// Single-shot 1–5 correctness rating of a system answer against the gold
/// answers (higher is better).
pub const DIRECT_PROMPT_TEMPLATE: &str = "Here is a question, a set of golden answers (split with /), an AI-generated answer. Can you judge whether the AI-generated answer is correct according to the question and golden answers? Simply give a score from 1 to 5.
1: The AI-generated answer is completely wrong.
2: The AI-generated answer is mostly wrong.
3: The AI-generated answer is neither wrong nor right.
4: The AI-generated answer is mostly right.
5: The AI-generated answer is completely right.

Question: {question}
Golden answers: {golds}
AI answer: {answer}";

/// Penalty weights for the heuristic schemes. The defaults are part of the
/// scoring definition; override only deliberately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeWeights {
    pub step_weight: f64,
    pub info_weight: f64,
    pub assumption_weight: f64,
}

impl Default for SchemeWeights {
    fn default() -> Self {
        SchemeWeights { step_weight: 10.0, info_weight: 3.0, assumption_weight: 5.0 }
    }
}

/// Render the explanation prompt for a gold premise and system hypothesis.
pub fn explain_prompt(s1: &str, s2: &str) -> String {
    EXPLAIN_PROMPT_TEMPLATE.replacen("{s1}", s1, 1).replacen("{s2}", s2, 1)
}

/// Render the direct-rating prompt. Gold answers are joined with `/`.
pub fn direct_prompt(question: &str, gold_answers: &[String], system_answer: &str) -> String {
    DIRECT_PROMPT_TEMPLATE
        .replacen("{question}", question, 1)
        .replacen("{golds}", &gold_answers.join("/"), 1)
        .replacen("{answer}", system_answer, 1)
}

/// An explanation plus the conversation that produced it, so the rating
/// follow-up can be issued in context.
#[derive(Debug, Clone, PartialEq)]
pub struct Explained {
    pub explanation: InferenceExplanation,
    /// Non-fatal oddities noticed while parsing (e.g. markers outside steps).
    pub warnings: Vec<String>,
    /// Transcript key of the explanation call.
    pub key: String,
    /// `[user explain-prompt, assistant response]`, the context for
    /// [`llm_score_from_explanation`].
    pub conversation: Vec<ChatMessage>,
}

/// Generate and parse an inference explanation for a rank-3 pair.
///
/// S1 is the gold statement (premise), S2 the system statement
/// (hypothesis).
pub fn explain(
    gateway: &Gateway,
    gold_statement: &Statement,
    system_statement: &Statement,
    config: &BackendConfig,
) -> Result<Explained> {
    let prompt = explain_prompt(&gold_statement.text, &system_statement.text);
    let request = ChatRequest::from_config(config, vec![ChatMessage::user(prompt)]);
    let completion = gateway.complete(&request)?;
    let (explanation, warnings) = parse_explanation(&completion.text)?;
    let mut conversation = request.messages;
    conversation.push(ChatMessage::assistant(completion.text));
    Ok(Explained { explanation, warnings, key: completion.key, conversation })
}

/// Parse a raw explanation into numbered steps and marker counts.
///
/// A step is a line whose trimmed form starts with digits followed by `.`
/// or `)`. Markers are counted over the whole raw text so a marker the
/// model put on its own line still registers; such strays also produce a
/// warning.
pub fn parse_explanation(raw: &str) -> Result<(InferenceExplanation, Vec<String>)> {
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(step) = strip_step_number(trimmed) {
            steps.push(step.trim_start().to_owned());
        } else if trimmed.contains("[[INFO]]") || trimmed.contains("[[ASSUMPTION]]") {
            warnings.push(format!("marker outside a numbered step on line {}", idx + 1));
        }
    }
    if steps.is_empty() {
        return Err(Error::NoStepsFound(raw.to_owned()));
    }
    let info_count = raw.matches("[[INFO]]").count();
    let assumption_count = raw.matches("[[ASSUMPTION]]").count();
    Ok((
        InferenceExplanation { raw_text: raw.to_owned(), steps, info_count, assumption_count },
        warnings,
    ))
}

/// If `line` starts with `<digits>.` or `<digits>)`, return the remainder.
fn strip_step_number(line: &str) -> Option<&str> {
    let digits = line.len() - line.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 {
        return None;
    }
    match line.as_bytes().get(digits) {
        Some(b'.') | Some(b')') => Some(&line[digits + 1..]),
        _ => None,
    }
}

/// Score an explanation under one of the heuristic schemes.
pub fn score_heuristic(expl: &InferenceExplanation, scheme: ScoreScheme) -> Result<PartialScore> {
    score_heuristic_with_weights(expl, scheme, SchemeWeights::default())
}

/// [`score_heuristic`] with explicit weights.
pub fn score_heuristic_with_weights(
    expl: &InferenceExplanation,
    scheme: ScoreScheme,
    weights: SchemeWeights,
) -> Result<PartialScore> {
    let step_pen = expl.steps.len() as f64 * weights.step_weight;
    let marker_pen = expl.info_count as f64 * weights.info_weight
        + expl.assumption_count as f64 * weights.assumption_weight;
    let value = match scheme {
        ScoreScheme::Cia => -(step_pen + marker_pen),
        ScoreScheme::C => -step_pen,
        ScoreScheme::Ia => -marker_pen,
        other => {
            return Err(Error::InvalidInput(format!(
                "score_heuristic applies to cia/c/ia, not {}",
                other.name()
            )))
        }
    };
    Ok(PartialScore { scheme, value })
}

/// Ask for the 1–5 inference-difficulty rating as a follow-up to an
/// explanation, reusing its conversation.
///
/// Returns the rating and the transcript key of the rating call.
pub fn llm_score_from_explanation(
    gateway: &Gateway,
    explained: &Explained,
    config: &BackendConfig,
) -> Result<(u8, String)> {
    let mut messages = explained.conversation.clone();
    messages.push(ChatMessage::user(RATE_PROMPT.to_owned()));
    let request = ChatRequest::from_config(config, messages);
    let completion = gateway.complete(&request)?;
    Ok((parse_score(&completion.text)?, completion.key))
}

/// Ask for the single-shot 1–5 correctness rating of an item's answer.
pub fn llm_score_direct(
    gateway: &Gateway,
    item: &EvalItem,
    config: &BackendConfig,
) -> Result<(u8, String)> {
    item.validate()?;
    let prompt = direct_prompt(&item.question, &item.gold_answers, &item.system_answer);
    let request = ChatRequest::from_config(config, vec![ChatMessage::user(prompt)]);
    let completion = gateway.complete(&request)?;
    Ok((parse_score(&completion.text)?, completion.key))
}

/// Parse a 1–5 rating: the first integer in the response, which must be in
/// range. "Score: 4" is 4; "0", "15", or prose with no integer fail.
pub fn parse_score(raw: &str) -> Result<u8> {
    let value = first_integer(raw)
        .ok_or_else(|| Error::ScoreParse(raw.to_owned()))?;
    if (1..=5).contains(&value) {
        Ok(value as u8)
    } else {
        Err(Error::ScoreParse(raw.to_owned()))
    }
}

fn first_integer(raw: &str) -> Option<i64> {
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let negative = bytes[i] == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit);
        if negative || bytes[i].is_ascii_digit() {
            let start = i;
            let mut end = if negative { i + 1 } else { i };
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            return raw[start..end].parse().ok();
        }
        i += 1;
    }
    None
}
