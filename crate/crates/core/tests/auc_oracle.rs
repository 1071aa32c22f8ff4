//! AUC against explicit pair counting on every labelling of short rankings.

mod common;

use std::collections::HashSet;

use showfinder::eval::{auc, rank_by_score};
use showfinder::Error;

use common::oracle::auc_pairs;

#[test]
fn every_labelling_up_to_eight() {
    let mut checked = 0;
    for n in 1..=8usize {
        // Ids in a scrambled order so position, not id, must matter.
        let ranking: Vec<u32> = (0..n as u32).map(|i| (i * 5 + 3) % 17).collect();
        for mask in 0u32..(1 << n) {
            let labels: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            let relevant: HashSet<u32> = ranking.iter().zip(&labels).filter(|(_, &l)| l).map(|(&id, _)| id).collect();
            match (auc(&ranking, &relevant), auc_pairs(&labels)) {
                (Ok(got), Some(want)) => assert_eq!(got, want, "n={n} mask={mask:b}"),
                (Err(Error::UndefinedMetric(_)), None) => {}
                (got, want) => panic!("n={n} mask={mask:b}: {got:?} vs {want:?}"),
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 510);
}

#[test]
fn relevant_ids_outside_the_ranking_are_ignored() {
    let relevant: HashSet<&str> = ["a", "zz"].into();
    assert_eq!(auc(&["a", "b", "c"], &relevant).unwrap(), 1.0);
}

#[test]
fn ranking_from_scores() {
    let scored = [("x", 0.1), ("y", 0.9), ("z", 0.5), ("w", 0.5)];
    let ranking = rank_by_score(&scored);
    assert_eq!(ranking, ["y", "w", "z", "x"]);
    let relevant: HashSet<&str> = ["z"].into();
    assert_eq!(auc(&ranking, &relevant).unwrap(), 1.0 / 3.0);
}
