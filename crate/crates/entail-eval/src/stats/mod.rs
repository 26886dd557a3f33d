//! Statistical apparatus for meta-evaluating answer judges: binary
//! agreement metrics, Cohen's kappa, Fisher's exact test, the
//! Brunner-Munzel test, rank-based AUROC, corpus BLEU and ROUGE.

mod auroc;
mod bleu;
mod brunner_munzel;
mod fisher;
mod kappa;
mod rouge;

pub use auroc::auroc;
pub use bleu::corpus_bleu;
pub use brunner_munzel::{brunner_munzel_one_sided, relative_effect, BrunnerMunzelResult};
pub use fisher::{fisher_exact_one_tailed, FisherResult};
pub use kappa::cohen_kappa;
pub use rouge::{rouge, rouge_l, rouge_n, RougeScore, RougeVariant};

use crate::error::{Error, Result};

/// Midranks (average ranks, 1-based) of `values`, ties shared.
///
/// Returned ranks are doubled and integral — rank 2.5 is stored as 5 — so
/// sums over them are exact. Callers divide by two at the end.
pub(crate) fn doubled_midranks(values: &[f64]) -> Result<Vec<u64>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN value in rank computation".into()));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN screened above"));
    let mut doubled = vec![0u64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i+1 ..= j+1 (1-based) share midrank (i+j+2)/2; doubled
        // that is exactly i+j+2.
        let doubled_rank = (i + j + 2) as u64;
        for &idx in &order[i..=j] {
            doubled[idx] = doubled_rank;
        }
        i = j + 1;
    }
    Ok(doubled)
}

/// Midranks as floats, for variance-style computations.
pub(crate) fn midranks(values: &[f64]) -> Result<Vec<f64>> {
    Ok(doubled_midranks(values)?.into_iter().map(|d| d as f64 / 2.0).collect())
}

/// Precision, recall, F1 and accuracy of binary predictions against
/// binary references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryMetrics {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

/// Compute binary classification metrics treating `true` as the positive
/// class. Empty inputs or mismatched lengths are errors. Degenerate
/// precision/recall (zero denominator) is taken as 0, matching the usual
/// scoring-script convention.
pub fn binary_f1_accuracy(predicted: &[bool], reference: &[bool]) -> Result<BinaryMetrics> {
    if predicted.len() != reference.len() {
        return Err(Error::LengthMismatch { left: predicted.len(), right: reference.len() });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidInput("empty input to binary_f1_accuracy".into()));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &r) in predicted.iter().zip(reference) {
        match (p, r) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let accuracy = (tp + tn) as f64 / predicted.len() as f64;
    Ok(BinaryMetrics { tp, fp, fn_, tn, precision, recall, f1, accuracy })
}

/// Mean and sample standard deviation (n-1 denominator; 0 when n < 2).
pub fn mean_and_stdev(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidInput("empty input to mean_and_stdev".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midranks_handle_ties() {
        // values: 1, 2, 2, 3 -> ranks 1, 2.5, 2.5, 4
        let r = midranks(&[1.0, 2.0, 2.0, 3.0]).unwrap();
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
        // all tied
        let r = midranks(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(r, vec![2.0, 2.0, 2.0]);
        // reverse sorted input
        let r = midranks(&[3.0, 2.0, 1.0]).unwrap();
        assert_eq!(r, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn midranks_reject_nan() {
        assert!(midranks(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn binary_metrics_hand_example() {
        // predicted [T,T,F,F] vs reference [T,F,T,F]: tp=1 fp=1 fn=1 tn=1
        let m = binary_f1_accuracy(&[true, true, false, false], &[true, false, true, false]).unwrap();
        assert_eq!((m.tp, m.fp, m.fn_, m.tn), (1, 1, 1, 1));
        assert_eq!(m.f1, 0.5);
        assert_eq!(m.accuracy, 0.5);
    }

    #[test]
    fn binary_metrics_all_correct() {
        let m = binary_f1_accuracy(&[true, false, true], &[true, false, true]).unwrap();
        assert_eq!(m.f1, 1.0);
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn binary_metrics_degenerate_no_positives() {
        let m = binary_f1_accuracy(&[false, false], &[false, false]).unwrap();
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn binary_metrics_input_checks() {
        assert!(binary_f1_accuracy(&[true], &[]).is_err());
        assert!(binary_f1_accuracy(&[], &[]).is_err());
    }

    #[test]
    fn mean_stdev_basics() {
        let (m, s) = mean_and_stdev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((m - 5.0).abs() < 1e-12);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        let (m, s) = mean_and_stdev(&[3.5]).unwrap();
        assert_eq!((m, s), (3.5, 0.0));
        assert!(mean_and_stdev(&[]).is_err());
    }
}
