//! Sentence-level ROUGE-N and ROUGE-L.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::text::metric_tokens;

/// Precision / recall / F1 triple for one candidate-reference pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    fn from_counts(overlap: usize, cand_total: usize, ref_total: usize) -> RougeScore {
        let precision = if cand_total == 0 { 0.0 } else { overlap as f64 / cand_total as f64 };
        let recall = if ref_total == 0 { 0.0 } else { overlap as f64 / ref_total as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        RougeScore { precision, recall, f1 }
    }
}

fn counted_ngrams(tokens: &[String], n: usize) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.join("\u{1}")).or_insert(0) += 1;
        }
    }
    counts
}

fn tokenize_pair(candidate: &str, reference: &str) -> Result<(Vec<String>, Vec<String>)> {
    let c = metric_tokens(candidate);
    let r = metric_tokens(reference);
    if c.is_empty() || r.is_empty() {
        return Err(Error::InvalidInput("empty text in ROUGE computation".into()));
    }
    Ok((c, r))
}

/// ROUGE-N: clipped n-gram overlap between candidate and reference.
pub fn rouge_n(candidate: &str, reference: &str, n: usize) -> Result<RougeScore> {
    if n == 0 {
        return Err(Error::InvalidInput("ROUGE order must be at least 1".into()));
    }
    let (c, r) = tokenize_pair(candidate, reference)?;
    let cc = counted_ngrams(&c, n);
    let rc = counted_ngrams(&r, n);
    let overlap: usize = cc
        .iter()
        .map(|(gram, &count)| count.min(rc.get(gram).copied().unwrap_or(0)))
        .sum();
    let cand_total: usize = cc.values().sum();
    let ref_total: usize = rc.values().sum();
    Ok(RougeScore::from_counts(overlap, cand_total, ref_total))
}

/// ROUGE-L: longest common subsequence between candidate and reference.
pub fn rouge_l(candidate: &str, reference: &str) -> Result<RougeScore> {
    let (c, r) = tokenize_pair(candidate, reference)?;
    let lcs = lcs_length(&c, &r);
    Ok(RougeScore::from_counts(lcs, c.len(), r.len()))
}

/// ROUGE variant selector for the unified [`rouge`] entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RougeVariant {
    R1,
    R2,
    Rl,
}

/// Unified ROUGE dispatcher over the three variants used in reports.
pub fn rouge(candidate: &str, reference: &str, variant: RougeVariant) -> Result<RougeScore> {
    match variant {
        RougeVariant::R1 => rouge_n(candidate, reference, 1),
        RougeVariant::R2 => rouge_n(candidate, reference, 2),
        RougeVariant::Rl => rouge_l(candidate, reference),
    }
}

/// Classic O(|a|*|b|) LCS length with a two-row table.
fn lcs_length(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for ai in a {
        for (j, bj) in b.iter().enumerate() {
            cur[j + 1] = if ai == bj { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
