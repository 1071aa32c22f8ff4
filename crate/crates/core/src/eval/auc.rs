use std::collections::HashSet;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Area under the ROC curve of a ranking, best first: the fraction of
/// (relevant, non-relevant) pairs in which the relevant item comes first.
/// Relevant ids absent from `ranking` are ignored.
pub fn auc<T: Eq + Hash>(ranking: &[T], relevant: &HashSet<T>) -> Result<f64> {
    let mut negatives_seen = 0u64;
    let mut misordered = 0u64;
    let mut positives = 0u64;
    for item in ranking {
        if relevant.contains(item) {
            positives += 1;
            misordered += negatives_seen;
        } else {
            negatives_seen += 1;
        }
    }
    if positives == 0 {
        return Err(Error::UndefinedMetric("no relevant candidates"));
    }
    if negatives_seen == 0 {
        return Err(Error::UndefinedMetric("every candidate is relevant"));
    }
    let pairs = positives * negatives_seen;
    Ok((pairs - misordered) as f64 / pairs as f64)
}

/// Orders scored candidates by score descending, then id ascending.
pub fn rank_by_score<T: Ord + Clone>(scored: &[(T, f64)]) -> Vec<T> {
    let mut sorted: Vec<&(T, f64)> = scored.iter().collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    sorted.into_iter().map(|(id, _)| id.clone()).collect()
}
