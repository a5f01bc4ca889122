//! Confusion matrices, support-weighted precision / recall / F1, binary
//! ROC-AUC, model ranking and the top-T embedding score.
//!
//! Zero-division conventions: precision is 0 when a class was never
//! predicted, recall is 0 when a class has no true samples, F1 is 0 when
//! precision + recall is 0. [`Metrics::zero_division`] records whether any of
//! them applied.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::Label;

#[derive(Debug, Error, PartialEq)]
pub enum EvaluationError {
    #[error("y_true has {truth} labels but y_pred has {pred}")]
    LengthMismatch { truth: usize, pred: usize },
    #[error("no samples to evaluate")]
    Empty,
    #[error("label {0} is not among the declared classes")]
    UnknownLabel(Label),
    #[error("AUC needs both classes; got {positives} positives and {negatives} negatives")]
    SingleClass { positives: usize, negatives: usize },
    #[error("binary labels must be 0 or 1, got {0}")]
    NotBinary(Label),
    #[error("score {0} is not finite")]
    NonFiniteScore(f64),
    #[error("embedding `{0}` has no reports")]
    EmptyGroup(String),
    #[error("T must be at least 1")]
    ZeroTop,
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<Label>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(y_true: &[Label], y_pred: &[Label], classes: &[Label]) -> Result<Self, EvaluationError> {
        if y_true.len() != y_pred.len() {
            return Err(EvaluationError::LengthMismatch {
                truth: y_true.len(),
                pred: y_pred.len(),
            });
        }
        if y_true.is_empty() {
            return Err(EvaluationError::Empty);
        }
        let k = classes.len();
        let pos = |l: Label| {
            classes
                .iter()
                .position(|&c| c == l)
                .ok_or(EvaluationError::UnknownLabel(l))
        };
        let mut counts = vec![vec![0u64; k]; k];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            counts[pos(t)?][pos(p)?] += 1;
        }
        Ok(ConfusionMatrix {
            classes: classes.to_vec(),
            counts,
        })
    }

    /// Builds a matrix from raw counts (K × K).
    pub fn from_counts(classes: Vec<Label>, counts: Vec<Vec<u64>>) -> Result<Self, EvaluationError> {
        let k = classes.len();
        assert!(
            counts.len() == k && counts.iter().all(|r| r.len() == k),
            "counts must be {k}×{k}"
        );
        if counts.iter().flatten().sum::<u64>() == 0 {
            return Err(EvaluationError::Empty);
        }
        Ok(ConfusionMatrix { classes, counts })
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// n_k: number of true samples of class `k`.
    pub fn support(&self, k: usize) -> u64 {
        self.counts[k].iter().sum()
    }

    pub fn true_positives(&self, k: usize) -> u64 {
        self.counts[k][k]
    }

    pub fn false_positives(&self, k: usize) -> u64 {
        self.counts.iter().map(|row| row[k]).sum::<u64>() - self.counts[k][k]
    }

    pub fn false_negatives(&self, k: usize) -> u64 {
        self.support(k) - self.counts[k][k]
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|k| self.counts[k][k]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub class: Label,
    pub support: u64,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub per_class: Vec<ClassMetrics>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// True when any zero-division convention was applied.
    pub zero_division: bool,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Per-class and support-weighted precision, recall and F1, plus accuracy.
pub fn classification_metrics(cm: &ConfusionMatrix) -> Metrics {
    let n = cm.total();
    let mut zero_division = false;
    let per_class: Vec<ClassMetrics> = cm
        .classes()
        .iter()
        .enumerate()
        .map(|(k, &class)| {
            let tp = cm.true_positives(k);
            let fp = cm.false_positives(k);
            let fn_ = cm.false_negatives(k);
            let precision = ratio(tp, tp + fp).unwrap_or_else(|| {
                zero_division = true;
                0.0
            });
            let recall = ratio(tp, tp + fn_).unwrap_or_else(|| {
                zero_division = true;
                0.0
            });
            let f1 = if precision + recall > 0.0 {
                2.0 * (precision * recall) / (precision + recall)
            } else {
                zero_division = true;
                0.0
            };
            ClassMetrics {
                class,
                support: tp + fn_,
                tp,
                fp,
                fn_,
                precision,
                recall,
                f1,
            }
        })
        .collect();

    let weighted = |f: fn(&ClassMetrics) -> f64| -> f64 {
        per_class.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / n as f64
    };
    Metrics {
        precision: weighted(|m| m.precision),
        recall: weighted(|m| m.recall),
        f1: weighted(|m| m.f1),
        accuracy: cm.trace() as f64 / n as f64,
        zero_division,
        per_class,
    }
}

/// Area under the ROC curve via the Mann-Whitney rank statistic. Tied scores
/// get mid-ranks, which credits each tied positive/negative pair with 0.5.
pub fn roc_auc_binary(y_true: &[Label], scores: &[f64]) -> Result<f64, EvaluationError> {
    if y_true.len() != scores.len() {
        return Err(EvaluationError::LengthMismatch {
            truth: y_true.len(),
            pred: scores.len(),
        });
    }
    if let Some(&bad) = y_true.iter().find(|&&l| l != 0 && l != 1) {
        return Err(EvaluationError::NotBinary(bad));
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(EvaluationError::NonFiniteScore(bad));
    }
    let positives = y_true.iter().filter(|&&l| l == 1).count();
    let negatives = y_true.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvaluationError::SingleClass { positives, negatives });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum of 1-based mid-ranks of the positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = order[i..=j].iter().filter(|&&t| y_true[t] == 1).count();
        rank_sum += mid * pos_in_group as f64;
        i = j + 1;
    }
    let p = positives as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    ThreeClass,
    Binary,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::ThreeClass => "three_class",
            Task::Binary => "binary",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "three_class" | "three" => Ok(Task::ThreeClass),
            "binary" => Ok(Task::Binary),
            _ => Err(format!("unknown task `{s}`")),
        }
    }
}

/// Evaluation of one model on one embedding's test split.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub model: String,
    pub embedding: String,
    pub task: Task,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    /// Present only for the binary task.
    pub auc_roc: Option<f64>,
}

impl EvaluationReport {
    /// Scores a three-class prediction.
    pub fn three_class(
        model: &str,
        embedding: &str,
        classes: &[Label],
        y_true: &[Label],
        y_pred: &[Label],
    ) -> Result<Self, EvaluationError> {
        let confusion = ConfusionMatrix::new(y_true, y_pred, classes)?;
        Ok(EvaluationReport {
            model: model.to_string(),
            embedding: embedding.to_string(),
            task: Task::ThreeClass,
            metrics: classification_metrics(&confusion),
            confusion,
            auc_roc: None,
        })
    }

    /// Scores a binary prediction; `positive_scores` are the class-1 scores.
    pub fn binary(
        model: &str,
        embedding: &str,
        y_true: &[Label],
        y_pred: &[Label],
        positive_scores: &[f64],
    ) -> Result<Self, EvaluationError> {
        let confusion = ConfusionMatrix::new(y_true, y_pred, &[0, 1])?;
        Ok(EvaluationReport {
            model: model.to_string(),
            embedding: embedding.to_string(),
            task: Task::Binary,
            metrics: classification_metrics(&confusion),
            confusion,
            auc_roc: Some(roc_auc_binary(y_true, positive_scores)?),
        })
    }

    pub fn f1(&self) -> f64 {
        self.metrics.f1
    }
}

/// Higher weighted F1 first, then model identifier ascending.
pub fn compare_reports(a: &EvaluationReport, b: &EvaluationReport) -> Ordering {
    b.f1().total_cmp(&a.f1()).then_with(|| a.model.cmp(&b.model))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedReport {
    /// 1-based.
    pub rank: usize,
    pub report: EvaluationReport,
}

pub fn rank_models(reports: &[EvaluationReport]) -> Vec<RankedReport> {
    let mut sorted = reports.to_vec();
    sorted.sort_by(compare_reports);
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, report)| RankedReport { rank: i + 1, report })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingScore {
    pub embedding: String,
    pub top: usize,
    /// Mean weighted F1 of the best `min(top, available)` models.
    pub mu: f64,
    pub models_used: usize,
}

/// Mean of the `t` largest values (all of them when fewer are given).
pub fn top_t_mean(values: &[f64], t: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v.truncate(t);
    mean(&v)
}

/// Arithmetic mean rounded as close to the exact value as two error-free
/// transformations allow: a compensated sum, then a fused remainder for the
/// division.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in values {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    let n = values.len() as f64;
    let q = sum / n;
    let rem = (-q).mul_add(n, sum);
    q + (rem + comp) / n
}

/// Top-T embedding score for every embedding present in `reports`.
pub fn embedding_performance(reports: &[EvaluationReport], top: usize) -> Result<Vec<EmbeddingScore>, EvaluationError> {
    if top == 0 {
        return Err(EvaluationError::ZeroTop);
    }
    let mut groups: BTreeMap<&str, Vec<EvaluationReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(&r.embedding).or_default().push(r.clone());
    }
    groups
        .into_iter()
        .map(|(embedding, group)| {
            if group.is_empty() {
                return Err(EvaluationError::EmptyGroup(embedding.to_string()));
            }
            let ranked = rank_models(&group);
            let f1s: Vec<f64> = ranked.iter().take(top).map(|r| r.report.f1()).collect();
            Ok(EmbeddingScore {
                embedding: embedding.to_string(),
                top,
                mu: mean(&f1s),
                models_used: f1s.len(),
            })
        })
        .collect()
}

/// CSV header for report rows.
pub const REPORT_CSV_HEADER: &str =
    "topic,task,embedding,model,f1_weighted,precision_weighted,recall_weighted,accuracy,auc_roc,seed";

/// One `reports.csv` row. Metrics are written at full precision.
pub fn report_csv_row(topic: &str, report: &EvaluationReport, seed: u64) -> String {
    let m = &report.metrics;
    let auc = report.auc_roc.map(|a| format!("{a:?}")).unwrap_or_default();
    format!(
        "{topic},{},{},{},{:?},{:?},{:?},{:?},{auc},{seed}",
        report.task, report.embedding, report.model, m.f1, m.precision, m.recall, m.accuracy
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn report(model: &str, embedding: &str, f1: f64) -> EvaluationReport {
        let cm = ConfusionMatrix::new(&[0, 1], &[0, 1], &[0, 1]).unwrap();
        let mut metrics = classification_metrics(&cm);
        metrics.f1 = f1;
        EvaluationReport {
            model: model.into(),
            embedding: embedding.into(),
            task: Task::ThreeClass,
            confusion: cm,
            metrics,
            auc_roc: None,
        }
    }

    #[test]
    fn confusion_examples() {
        let cm = ConfusionMatrix::new(&[0, 1, 1], &[0, 1, 1], &[0, 1]).unwrap();
        assert_eq!(cm.counts(), &[vec![1, 0], vec![0, 2]]);

        let cm = ConfusionMatrix::new(&[1, 1, 0, 0, 0], &[1, 0, 0, 0, 1], &[0, 1]).unwrap();
        assert_eq!(cm.counts(), &[vec![2, 1], vec![1, 1]]);

        let cm = ConfusionMatrix::new(&[0, 1, 0], &[1, 1, 0], &[0, 1, 2]).unwrap();
        assert_eq!(cm.counts()[2], vec![0, 0, 0]);
        assert!(cm.counts().iter().all(|r| r[2] == 0));
    }

    #[test]
    fn confusion_errors() {
        assert_eq!(
            ConfusionMatrix::new(&[0, 1], &[0], &[0, 1]),
            Err(EvaluationError::LengthMismatch { truth: 2, pred: 1 })
        );
        assert_eq!(
            ConfusionMatrix::new(&[0, 7], &[0, 1], &[0, 1]),
            Err(EvaluationError::UnknownLabel(7))
        );
        assert_eq!(ConfusionMatrix::new(&[], &[], &[0, 1]), Err(EvaluationError::Empty));
    }

    #[test]
    fn hand_checked_metrics() {
        let cm = ConfusionMatrix::new(&[1, 1, 0, 0, 0], &[1, 0, 0, 0, 1], &[0, 1]).unwrap();
        let m = classification_metrics(&cm);
        let c0 = &m.per_class[0];
        let c1 = &m.per_class[1];
        assert_eq!((c1.precision, c1.recall, c1.f1), (0.5, 0.5, 0.5));
        assert_eq!((c0.precision, c0.recall), (2.0 / 3.0, 2.0 / 3.0));
        assert!((c0.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.f1, 0.6);
        assert_eq!(m.accuracy, 0.6);
        assert!(!m.zero_division);
    }

    #[test]
    fn perfect_three_class() {
        let y = [-1, 0, 1, 1, 0];
        let cm = ConfusionMatrix::new(&y, &y, &[-1, 0, 1]).unwrap();
        let m = classification_metrics(&cm);
        assert_eq!((m.precision, m.recall, m.f1, m.accuracy), (1.0, 1.0, 1.0, 1.0));
        assert!(m.per_class.iter().all(|c| c.f1 == 1.0));
    }

    #[test]
    fn never_predicted_class_has_zero_precision() {
        let cm = ConfusionMatrix::new(&[0, 1, 1], &[0, 0, 0], &[0, 1]).unwrap();
        let m = classification_metrics(&cm);
        assert_eq!(m.per_class[1].precision, 0.0);
        assert_eq!(m.per_class[1].f1, 0.0);
        assert!(m.zero_division);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc_binary(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
        assert_eq!(roc_auc_binary(&[0, 1, 0, 1], &[0.3; 4]).unwrap(), 0.5);
        assert_eq!(roc_auc_binary(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8]).unwrap(), 0.75);
        assert!(matches!(
            roc_auc_binary(&[1, 1], &[0.1, 0.2]),
            Err(EvaluationError::SingleClass { .. })
        ));
        assert_eq!(roc_auc_binary(&[0, 2], &[0.1, 0.2]), Err(EvaluationError::NotBinary(2)));
    }

    #[test]
    fn ranking() {
        let ranked = rank_models(&[report("B", "e", 0.7), report("A", "e", 0.9)]);
        assert_eq!(ranked[0].report.model, "A");
        assert_eq!((ranked[0].rank, ranked[1].rank), (1, 2));
        let ranked = rank_models(&[report("B", "e", 0.8), report("A", "e", 0.8)]);
        let names: Vec<_> = ranked.iter().map(|r| r.report.model.as_str()).collect();
        assert_eq!(names, ["A", "B"]);
    }

    #[test]
    fn ranking_matches_reference_sort() {
        let f1s = [0.31, 0.77, 0.5, 0.77, 0.12, 0.99, 0.5, 0.64, 0.0, 0.77];
        let reports: Vec<_> = f1s
            .iter()
            .enumerate()
            .map(|(i, &f)| report(&format!("m{}", (i * 7) % 10), "e", f))
            .collect();
        let ranked = rank_models(&reports);
        // oracle: selection by repeated maximum with explicit tie rule
        let mut pool: Vec<(f64, String)> = reports.iter().map(|r| (r.f1(), r.model.clone())).collect();
        for r in &ranked {
            let mut best = 0;
            for i in 1..pool.len() {
                let (f, ref m) = pool[i];
                if f > pool[best].0 || (f == pool[best].0 && *m < pool[best].1) {
                    best = i;
                }
            }
            let (f, m) = pool.remove(best);
            assert_eq!((r.report.f1(), &r.report.model), (f, &m));
        }
    }

    #[test]
    fn top_t_scores() {
        let reps: Vec<_> = [0.9, 0.8, 0.7, 0.6]
            .iter()
            .enumerate()
            .map(|(i, &f)| report(&format!("m{i}"), "glove", f))
            .collect();
        let s = &embedding_performance(&reps, 3).unwrap()[0];
        assert_eq!(s.mu, 0.8);
        assert_eq!(s.models_used, 3);
        assert_eq!(embedding_performance(&reps, 1).unwrap()[0].mu, 0.9);
        assert_eq!(embedding_performance(&reps, 10).unwrap()[0].mu, 0.75);
        assert_eq!(embedding_performance(&reps, 0), Err(EvaluationError::ZeroTop));
    }

    #[test]
    fn groups_by_embedding() {
        let reps = vec![
            report("a", "w2v", 0.4),
            report("b", "glove", 0.9),
            report("c", "w2v", 0.6),
        ];
        let s = embedding_performance(&reps, 5).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].embedding.as_str(), s[0].mu), ("glove", 0.9));
        assert_eq!((s[1].embedding.as_str(), s[1].models_used), ("w2v", 2));
        assert!((s[1].mu - 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_row_format() {
        let r = EvaluationReport::binary("knn", "glove", &[0, 1, 1, 0], &[0, 1, 0, 0], &[0.1, 0.9, 0.4, 0.2]).unwrap();
        let row = report_csv_row("vaccines", &r, 7);
        assert!(row.starts_with("vaccines,binary,glove,knn,"));
        assert!(row.ends_with(",1.0,7"));
        let three = EvaluationReport::three_class("knn", "glove", &[-1, 0, 1], &[-1, 0, 1], &[-1, 0, 1]).unwrap();
        assert_eq!(
            report_csv_row("moon", &three, 1),
            "moon,three_class,glove,knn,1.0,1.0,1.0,1.0,,1"
        );
    }

    fn exact_mean(values: &[f64]) -> f64 {
        // exact rational mean of the doubles, via integer mantissas
        use std::cmp::min;
        let parts: Vec<(i128, i32)> = values
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    return (0, 0);
                }
                let bits = v.to_bits();
                let exp = ((bits >> 52) & 0x7ff) as i32;
                let mant = (bits & ((1 << 52) - 1)) as i128 | (1 << 52);
                let sign = if v < 0.0 { -1 } else { 1 };
                (sign * mant, exp - 1075)
            })
            .collect();
        let e0 = parts.iter().map(|p| p.1).fold(i32::MAX, min);
        let sum: i128 = parts.iter().map(|&(m, e)| m << (e - e0)).sum();
        // sum * 2^e0 / n; scale up for enough quotient bits
        let n = values.len() as i128;
        let shift = 60;
        let q = (sum << shift) / n;
        let r = (sum << shift) % n;
        let q = q as f64 + r as f64 / n as f64;
        q * 2f64.powi(e0 - shift)
    }

    proptest! {
        #[test]
        fn mean_is_near_exact(values in proptest::collection::vec(0.01f64..1.0, 1..16)) {
            let got = mean(&values);
            let want = exact_mean(&values);
            prop_assert!((got - want).abs() <= f64::EPSILON * want.abs());
        }

        #[test]
        fn auc_monotone_invariance_and_reflection(
            pairs in proptest::collection::vec((0i32..2, -5.0f64..5.0), 2..40)
        ) {
            let y: Vec<Label> = pairs.iter().map(|p| p.0).collect();
            let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let a = roc_auc_binary(&y, &s).unwrap();
            let lin: Vec<f64> = s.iter().map(|v| 2.0 * v + 1.0).collect();
            let cube: Vec<f64> = s.iter().map(|v| v * v * v).collect();
            prop_assert!((roc_auc_binary(&y, &lin).unwrap() - a).abs() < 1e-12);
            prop_assert!((roc_auc_binary(&y, &cube).unwrap() - a).abs() < 1e-12);
            let mut sorted = s.clone();
            sorted.sort_by(f64::total_cmp);
            if sorted.windows(2).all(|w| w[0] != w[1]) {
                let neg: Vec<f64> = s.iter().map(|v| -v).collect();
                prop_assert!((roc_auc_binary(&y, &neg).unwrap() + a - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn weighted_metrics_bounds(
            pairs in proptest::collection::vec((0i32..3, 0i32..3), 1..100)
        ) {
            let t: Vec<Label> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<Label> = pairs.iter().map(|p| p.1).collect();
            let cm = ConfusionMatrix::new(&t, &p, &[0, 1, 2]).unwrap();
            let m = classification_metrics(&cm);
            prop_assert!((m.recall - m.accuracy).abs() < 1e-12);
            for v in [m.precision, m.recall, m.f1, m.accuracy] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let present: Vec<f64> = m.per_class.iter().filter(|c| c.support > 0).map(|c| c.f1).collect();
            let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m.f1 >= lo - 1e-12 && m.f1 <= hi + 1e-12);
        }

        #[test]
        fn swapping_binary_roles_swaps_class_metrics(
            pairs in proptest::collection::vec((0i32..2, 0i32..2), 1..60)
        ) {
            let t: Vec<Label> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<Label> = pairs.iter().map(|p| p.1).collect();
            let flip = |v: &[Label]| v.iter().map(|x| 1 - x).collect::<Vec<_>>();
            let a = classification_metrics(&ConfusionMatrix::new(&t, &p, &[0, 1]).unwrap());
            let b = classification_metrics(&ConfusionMatrix::new(&flip(&t), &flip(&p), &[0, 1]).unwrap());
            for k in 0..2 {
                let (x, y) = (&a.per_class[k], &b.per_class[1 - k]);
                prop_assert_eq!((x.tp, x.fp, x.fn_), (y.tp, y.fp, y.fn_));
                prop_assert_eq!((x.precision, x.recall, x.f1), (y.precision, y.recall, y.f1));
            }
            prop_assert_eq!(a.f1, b.f1);
        }
    }
}
