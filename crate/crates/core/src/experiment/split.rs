use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::Label;

#[derive(Debug, Error, PartialEq)]
pub enum SplitError {
    #[error("label {0} is not one of -1, 0, 1")]
    OutOfRange(Label),
    #[error("test_fraction {0} must lie strictly between 0 and 1")]
    BadFraction(f64),
    #[error("class {class} has {count} sample(s); a split needs at least 2")]
    ClassTooSmall { class: Label, count: usize },
}

/// Misinformation (1) stays 1; neutral (0) and debunking (-1) become 0.
pub fn binarize_labels(labels: &[Label]) -> Result<Vec<Label>, SplitError> {
    labels
        .iter()
        .map(|&l| match l {
            1 => Ok(1),
            0 | -1 => Ok(0),
            other => Err(SplitError::OutOfRange(other)),
        })
        .collect()
}

/// Row indices of a train/test partition, each ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn select_rows(x: ArrayView2<f64>, rows: &[usize]) -> Array2<f64> {
        x.select(Axis(0), rows)
    }

    pub fn select_labels(y: &[Label], rows: &[usize]) -> Vec<Label> {
        rows.iter().map(|&i| y[i]).collect()
    }
}

/// Per class, `round(n_k * test_fraction)` clamped to `[1, n_k - 1]` rows go
/// to the test side, chosen by a seeded shuffle within the class.
pub fn stratified_split(labels: &[Label], test_fraction: f64, seed: u64) -> Result<Split, SplitError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(SplitError::BadFraction(test_fraction));
    }
    let mut members: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        members.entry(l).or_default().push(i);
    }
    if let Some((&class, m)) = members.iter().find(|(_, m)| m.len() < 2) {
        return Err(SplitError::ClassTooSmall { class, count: m.len() });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for rows in members.values_mut() {
        let n = rows.len();
        let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        rows.shuffle(&mut rng);
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn class_count(labels: &[Label], rows: &[usize], class: Label) -> usize {
        rows.iter().filter(|&&i| labels[i] == class).count()
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize_labels(&[1, 0, -1]).unwrap(), vec![1, 0, 0]);
        assert_eq!(binarize_labels(&[1, 1]).unwrap(), vec![1, 1]);
        assert_eq!(binarize_labels(&[1, 2]), Err(SplitError::OutOfRange(2)));
    }

    #[test]
    fn proportional_counts() {
        let mut y = vec![0; 60];
        y.extend(vec![1; 20]);
        y.extend(vec![-1; 20]);
        let s = stratified_split(&y, 0.15, 1).unwrap();
        assert_eq!(class_count(&y, &s.test, 0), 9);
        assert_eq!(class_count(&y, &s.test, 1), 3);
        assert_eq!(class_count(&y, &s.test, -1), 3);
        assert_eq!(s.train.len() + s.test.len(), 100);
    }

    #[test]
    fn tiny_class_is_clamped() {
        let y = [0, 0, 1, 1, 1, 1, 1, 1, 1, 1];
        let s = stratified_split(&y, 0.15, 3).unwrap();
        assert_eq!(class_count(&y, &s.test, 0), 1);
        assert_eq!(class_count(&y, &s.train, 0), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(
            stratified_split(&[0, 1, 1], 0.2, 0),
            Err(SplitError::ClassTooSmall { class: 0, count: 1 })
        );
        assert_eq!(stratified_split(&[0, 0], 1.0, 0), Err(SplitError::BadFraction(1.0)));
    }

    #[test]
    fn seeds_change_membership_not_counts() {
        let y: Vec<Label> = (0..500).map(|i| ((i * 7919) % 3) as Label - 1).collect();
        let a = stratified_split(&y, 0.15, 10).unwrap();
        let b = stratified_split(&y, 0.15, 11).unwrap();
        assert_ne!(a.test, b.test);
        for c in [-1, 0, 1] {
            assert_eq!(class_count(&y, &a.test, c), class_count(&y, &b.test, c));
        }
        assert_eq!(a, stratified_split(&y, 0.15, 10).unwrap());
    }

    proptest! {
        #[test]
        fn binarize_elementwise(labels in proptest::collection::vec(-1i32..=1, 0..100)) {
            let out = binarize_labels(&labels).unwrap();
            for (a, b) in labels.iter().zip(&out) {
                prop_assert_eq!(*b, if *a == 1 { 1 } else { 0 });
            }
        }

        #[test]
        fn split_is_a_partition(
            labels in proptest::collection::vec(0i32..3, 2..200),
            frac in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let mut counts = BTreeMap::new();
            for &l in &labels { *counts.entry(l).or_insert(0usize) += 1; }
            prop_assume!(counts.values().all(|&c| c >= 2));
            let s = stratified_split(&labels, frac, seed).unwrap();
            let train: HashSet<_> = s.train.iter().collect();
            prop_assert!(s.test.iter().all(|i| !train.contains(i)));
            prop_assert_eq!(s.train.len() + s.test.len(), labels.len());
            for (&c, &n) in &counts {
                let t = class_count(&labels, &s.test, c);
                let want = ((n as f64 * frac).round() as usize).clamp(1, n - 1);
                prop_assert_eq!(t, want);
            }
        }
    }
}
