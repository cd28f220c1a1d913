use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::DetRng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn class_indices(y: &[u8], class: u8) -> Vec<usize> {
    (0..y.len()).filter(|&i| y[i] == class).collect()
}

/// Per-class random holdout of `round(fraction * count)` rows, at least one
/// and never the whole class when the class has two or more members.
/// Returns sorted `(train, holdout)` row indices.
pub fn stratified_holdout(y: &[u8], fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut hold = Vec::new();
    for class in [0u8, 1] {
        let mut idx = class_indices(y, class);
        DetRng::derive(seed, class as u64).shuffle(&mut idx);
        let m = idx.len();
        let take = if m < 2 {
            0
        } else {
            ((fraction * m as f64).round() as usize).clamp(1, m - 1)
        };
        hold.extend_from_slice(&idx[..take]);
        train.extend_from_slice(&idx[take..]);
    }
    train.sort_unstable();
    hold.sort_unstable();
    (train, hold)
}

/// `k` folds whose test sets partition `0..y.len()`. Each class is shuffled
/// and dealt round-robin, continuing where the previous class stopped so
/// fold sizes also stay within one of each other.
pub fn stratified_kfold(y: &[u8], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k = {k}; need at least 2 folds")));
    }
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0;
    for class in [0u8, 1] {
        let mut idx = class_indices(y, class);
        if idx.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                count: idx.len(),
                k,
            });
        }
        DetRng::derive(seed, class as u64).shuffle(&mut idx);
        for i in idx {
            tests[next].push(i);
            next = (next + 1) % k;
        }
    }
    let mut fold_of = vec![0usize; y.len()];
    for (f, t) in tests.iter_mut().enumerate() {
        t.sort_unstable();
        for &i in t.iter() {
            fold_of[i] = f;
        }
    }
    Ok(tests
        .into_iter()
        .enumerate()
        .map(|(f, test)| Fold {
            train: (0..y.len()).filter(|&i| fold_of[i] != f).collect(),
            test,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hundred_ids_twenty_risky() {
        let y: Vec<u8> = (0..100).map(|i| (i % 5 == 0) as u8).collect();
        let folds = stratified_kfold(&y, 5, 42).unwrap();
        for f in &folds {
            assert_eq!(f.test.iter().filter(|&&i| y[i] == 1).count(), 4);
            assert_eq!(f.test.len(), 20);
        }
        assert_eq!(folds, stratified_kfold(&y, 5, 42).unwrap());
    }

    #[test]
    fn small_class_is_an_error() {
        let y = [1, 1, 1, 1, 0, 0, 0, 0, 0, 0];
        assert!(matches!(
            stratified_kfold(&y, 5, 42),
            Err(Error::ClassTooSmall { class: 1, count: 4, k: 5 })
        ));
    }

    #[test]
    fn holdout_keeps_both_classes_on_each_side() {
        let y: Vec<u8> = (0..50).map(|i| (i < 5) as u8).collect();
        let (tr, va) = stratified_holdout(&y, 0.1, 42);
        assert_eq!(va.len(), 6);
        assert_eq!(va.iter().filter(|&&i| y[i] == 1).count(), 1);
        assert_eq!(tr.len() + va.len(), 50);
        assert!(tr.iter().any(|&i| y[i] == 1));
    }

    proptest! {
        #[test]
        fn folds_partition_and_stay_proportional(
            y in proptest::collection::vec(0u8..2, 10..300),
            k in 2usize..8,
            seed in any::<u64>(),
        ) {
            let pos = y.iter().filter(|&&t| t == 1).count();
            let neg = y.len() - pos;
            prop_assume!(pos >= k && neg >= k);
            let folds = stratified_kfold(&y, k, seed).unwrap();
            let mut seen = vec![0u32; y.len()];
            for f in &folds {
                for &i in &f.test { seen[i] += 1; }
                prop_assert_eq!(f.train.len() + f.test.len(), y.len());
                let p = f.test.iter().filter(|&&i| y[i] == 1).count() as f64;
                let n = f.test.len() as f64 - p;
                prop_assert!((p - pos as f64 / k as f64).abs() <= 1.0);
                prop_assert!((n - neg as f64 / k as f64).abs() <= 1.0);
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
        }
    }
}
