//! Area under the ROC curve via the rank-sum (Mann-Whitney) identity, with
//! tied scores contributing half a concordance.

use crate::error::{Error, Result};

use super::doubled_midranks;

/// AUROC of `scores` against binary `labels` (`true` = positive class).
///
/// Equivalent to (concordant pairs + 0.5 * tied pairs) / (positives *
/// negatives), computed here from midranks in O(n log n). Requires both
/// classes to be present and at least one score pair; NaN scores are
/// rejected.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: labels.len() });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateSample(format!(
            "AUROC needs both classes (got {n_pos} positive, {n_neg} negative)"
        )));
    }
    let doubled = doubled_midranks(scores)?;
    // Doubled ranks keep everything integral: numerator*2 =
    // sum(2*rank_pos) - n_pos*(n_pos+1) = 2*concordant + ties, exactly.
    let pos_rank_sum: u64 = doubled
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l)
        .map(|(&r, _)| r)
        .sum();
    let doubled_numerator = pos_rank_sum - (n_pos as u64) * (n_pos as u64 + 1);
    Ok(doubled_numerator as f64 / (2 * n_pos * n_neg) as f64)
}
