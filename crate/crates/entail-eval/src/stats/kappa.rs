//! Cohen's kappa for inter-run / inter-annotator agreement.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cohen's kappa between two aligned label sequences.
///
/// kappa = (p_o - p_e) / (1 - p_e), where p_o is observed agreement and p_e
/// the chance agreement from the raters' marginal label distributions.
/// When p_e == 1 (both raters constant on the same label) the statistic is
/// defined by continuity: 1.0 if the raters agree everywhere, else 0.0.
///
/// The chance term is summed in label order, so the result is deterministic
/// and exactly symmetric in its arguments.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("empty input to cohen_kappa".into()));
    }
    let n = a.len() as f64;
    let mut agree = 0usize;
    let mut count_a: BTreeMap<&T, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<&T, usize> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        if x == y {
            agree += 1;
        }
        *count_a.entry(x).or_insert(0) += 1;
        *count_b.entry(y).or_insert(0) += 1;
    }
    let p_o = agree as f64 / n;
    let p_e = count_a
        .iter()
        .map(|(label, &ca)| {
            let cb = count_b.get(label).copied().unwrap_or(0);
            (ca as f64 / n) * (cb as f64 / n)
        })
        .sum::<f64>();
    if p_e >= 1.0 {
        return Ok(if p_o >= 1.0 { 1.0 } else { 0.0 });
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}
