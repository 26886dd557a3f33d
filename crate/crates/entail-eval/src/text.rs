//! Text normalization helpers shared by the lexical metrics.
//!
//! Two tokenizers coexist on purpose:
//!
//! * [`qa_tokens`] is the SQuAD-style normalization (lowercase, drop
//!   punctuation, drop English articles) used by `lexical_match` and
//!   `token_f1`.
//! * [`metric_tokens`] keeps articles and is used by BLEU and ROUGE, where
//!   article choice is part of surface agreement.

/// Lowercase `s` and remove every non-alphanumeric, non-whitespace character.
///
/// Punctuation is deleted rather than replaced by a space, so "U.S." becomes
/// "us" and "don't" becomes "dont".
pub fn normalize(s: &str) -> String {
    s.to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect()
}

/// Tokenize for BLEU/ROUGE: lowercase, strip punctuation, split on whitespace.
pub fn metric_tokens(s: &str) -> Vec<String> {
    normalize(s).split_whitespace().map(str::to_owned).collect()
}

/// Tokenize for answer matching: like [`metric_tokens`] but additionally
/// removes the articles "a", "an" and "the".
pub fn qa_tokens(s: &str) -> Vec<String> {
    metric_tokens(s)
        .into_iter()
        .filter(|t| !matches!(t.as_str(), "a" | "an" | "the"))
        .collect()
}

/// True when `needle` occurs as a contiguous subsequence of `haystack`.
pub fn contains_subsequence(haystack: &[String], needle: &[String]) -> bool {
    if needle.is_empty() {
        return false;
    }
    haystack.windows(needle.len()).any(|w| w == needle)
}
