//! Corpus-level BLEU with a single reference per candidate.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::text::metric_tokens;

const MAX_ORDER: usize = 4;

/// Count n-grams of `tokens`; keys are tokens joined by a separator that
/// cannot occur in normalized text.
fn ngram_counts(tokens: &[String], n: usize) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w.join("\u{1}")).or_insert(0) += 1;
        }
    }
    counts
}

/// Corpus BLEU (0-100) of `candidates` against aligned single
/// `references`, n-grams up to 4 with uniform weights.
///
/// Texts are normalized and tokenized internally (lowercase, punctuation
/// stripped). Modified n-gram precisions are pooled over the corpus and the
/// brevity penalty uses corpus-level lengths. Zero matched counts for
/// n >= 2 fall back to (matched+1)/(total+1) so that near-identical short
/// corpora are not annihilated; a zero 1-gram match yields BLEU 0. Empty
/// and misaligned corpora are errors.
pub fn corpus_bleu(candidates: &[String], references: &[String]) -> Result<f64> {
    if candidates.len() != references.len() {
        return Err(Error::LengthMismatch { left: candidates.len(), right: references.len() });
    }
    if candidates.is_empty() {
        return Err(Error::InvalidInput("empty corpus in corpus_bleu".into()));
    }

    let mut matched = [0usize; MAX_ORDER];
    let mut total = [0usize; MAX_ORDER];
    let mut cand_len = 0usize;
    let mut ref_len = 0usize;

    for (cand, reference) in candidates.iter().zip(references) {
        let ct = metric_tokens(cand);
        let rt = metric_tokens(reference);
        cand_len += ct.len();
        ref_len += rt.len();
        for n in 1..=MAX_ORDER {
            let cc = ngram_counts(&ct, n);
            let rc = ngram_counts(&rt, n);
            for (gram, &count) in &cc {
                total[n - 1] += count;
                matched[n - 1] += count.min(rc.get(gram).copied().unwrap_or(0));
            }
        }
    }

    if matched[0] == 0 {
        return Ok(0.0);
    }

    let mut log_precision_sum = 0.0;
    for n in 1..=MAX_ORDER {
        let (m, t) = (matched[n - 1], total[n - 1]);
        let p = if n == 1 {
            m as f64 / t as f64
        } else if m == 0 {
            (m + 1) as f64 / (t + 1) as f64
        } else {
            m as f64 / t as f64
        };
        log_precision_sum += p.ln();
    }
    let geo_mean = (log_precision_sum / MAX_ORDER as f64).exp();

    let bp = if cand_len >= ref_len {
        1.0
    } else if cand_len == 0 {
        0.0
    } else {
        (1.0 - ref_len as f64 / cand_len as f64).exp()
    };
    Ok(100.0 * bp * geo_mean)
}
