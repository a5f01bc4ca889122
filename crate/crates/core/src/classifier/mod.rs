//! Classifier suite behind a single train / predict / score interface.
//!
//! Every model maps labels onto class indices `0..K` in ascending label
//! order. `predict` is the row-wise argmax of `predict_scores`, with ties
//! going to the lower class label, so the two can never disagree.

mod centroid;
mod forest;
mod knn;
pub mod logistic;
mod naive_bayes;
mod scaler;
mod serialize;
mod svm;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

use crate::Label;

pub use forest::{DecisionTree, Forest, ForestParams};
pub use scaler::Scaler;

#[derive(Debug, Error, PartialEq)]
pub enum ClassifierError {
    #[error("training set is empty")]
    Empty,
    #[error("{rows} feature rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("training labels contain a single class ({0}); need at least two")]
    SingleClass(Label),
    #[error("non-finite feature at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("model expects {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("{algorithm} has no hyperparameter `{key}`")]
    UnknownHyperparam { algorithm: Algorithm, key: String },
    #[error("hyperparameter {key} = {value}: {reason}")]
    InvalidHyperparam {
        key: String,
        value: f64,
        reason: &'static str,
    },
    #[error("model text line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Knn,
    NearestCentroid,
    LogisticRegression,
    LinearSvmOvr,
    GaussianNaiveBayes,
    RandomForest,
    DummyMostFrequent,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Knn,
        Algorithm::NearestCentroid,
        Algorithm::LogisticRegression,
        Algorithm::LinearSvmOvr,
        Algorithm::GaussianNaiveBayes,
        Algorithm::RandomForest,
        Algorithm::DummyMostFrequent,
    ];

    /// The six real learners, without the dummy baseline.
    pub const SUITE: [Algorithm; 6] = [
        Algorithm::Knn,
        Algorithm::NearestCentroid,
        Algorithm::LogisticRegression,
        Algorithm::LinearSvmOvr,
        Algorithm::GaussianNaiveBayes,
        Algorithm::RandomForest,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Knn => "knn",
            Algorithm::NearestCentroid => "nearest_centroid",
            Algorithm::LogisticRegression => "logistic_regression",
            Algorithm::LinearSvmOvr => "linear_svm",
            Algorithm::GaussianNaiveBayes => "gaussian_nb",
            Algorithm::RandomForest => "random_forest",
            Algorithm::DummyMostFrequent => "dummy_most_frequent",
        }
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self, Algorithm::DummyMostFrequent)
    }

    /// Hyperparameter keys and their defaults.
    pub fn defaults(&self) -> &'static [(&'static str, f64)] {
        match self {
            Algorithm::Knn => &[("k", 5.0)],
            Algorithm::NearestCentroid => &[("standardize", 0.0)],
            Algorithm::LogisticRegression => &[("lr", 0.1), ("l2", 1e-4), ("iters", 500.0)],
            Algorithm::LinearSvmOvr => &[("lr", 0.01), ("c", 1.0), ("iters", 500.0)],
            Algorithm::GaussianNaiveBayes => &[("var_smoothing", 1e-9)],
            Algorithm::RandomForest => &[
                ("trees", 100.0),
                ("max_depth", 12.0),
                ("min_leaf", 2.0),
                ("bootstrap", 1.0),
                // 0 selects floor(sqrt(D))
                ("max_features", 0.0),
            ],
            Algorithm::DummyMostFrequent => &[],
        }
    }

    fn uses_scaler(&self, hp: &Hyperparams) -> bool {
        match self {
            Algorithm::Knn | Algorithm::LogisticRegression | Algorithm::LinearSvmOvr => true,
            Algorithm::NearestCentroid => hp.get("standardize") != 0.0,
            _ => false,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.tag() == s)
            .ok_or_else(|| ClassifierError::UnknownAlgorithm(s.to_string()))
    }
}

/// Keyed scalar hyperparameters, always fully populated with defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparams(BTreeMap<String, f64>);

impl Hyperparams {
    pub fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or(f64::NAN)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub algorithm: Algorithm,
    hyperparams: Hyperparams,
    pub seed: u64,
}

impl AlgorithmSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        let map = algorithm.defaults().iter().map(|(k, v)| (k.to_string(), *v)).collect();
        AlgorithmSpec {
            algorithm,
            hyperparams: Hyperparams(map),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Overrides one hyperparameter, validating key and range.
    pub fn set(mut self, key: &str, value: f64) -> Result<Self, ClassifierError> {
        if !self.hyperparams.0.contains_key(key) {
            return Err(ClassifierError::UnknownHyperparam {
                algorithm: self.algorithm,
                key: key.to_string(),
            });
        }
        check_range(key, value)?;
        self.hyperparams.0.insert(key.to_string(), value);
        Ok(self)
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    pub fn get(&self, key: &str) -> f64 {
        self.hyperparams.get(key)
    }

    fn validate(&self) -> Result<(), ClassifierError> {
        self.hyperparams.iter().try_for_each(|(k, v)| check_range(k, v))
    }
}

fn check_range(key: &str, value: f64) -> Result<(), ClassifierError> {
    let bad = |reason| {
        Err(ClassifierError::InvalidHyperparam {
            key: key.to_string(),
            value,
            reason,
        })
    };
    if !value.is_finite() {
        return bad("must be finite");
    }
    let integral = value.fract() == 0.0;
    match key {
        "k" | "iters" | "trees" | "max_depth" | "min_leaf" => {
            if !integral || value < 1.0 {
                return bad("must be an integer >= 1");
            }
        }
        "max_features" => {
            if !integral || value < 0.0 {
                return bad("must be an integer >= 0");
            }
        }
        "standardize" | "bootstrap" => {
            if value != 0.0 && value != 1.0 {
                return bad("must be 0 or 1");
            }
        }
        "lr" | "c" | "var_smoothing" if value <= 0.0 => return bad("must be > 0"),
        "l2" if value < 0.0 => return bad("must be >= 0"),
        _ => {}
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum ModelState {
    Knn(knn::KnnModel),
    Centroid(centroid::CentroidModel),
    Logistic(logistic::LogisticModel),
    Svm(svm::SvmModel),
    NaiveBayes(naive_bayes::GaussianNb),
    Forest(Forest),
    Dummy { class: usize },
}

/// A fitted classifier. Immutable after training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    spec: AlgorithmSpec,
    classes: Vec<Label>,
    dim: usize,
    scaler: Option<Scaler>,
    state: ModelState,
}

/// Fits `spec.algorithm` on `features` / `labels`.
pub fn train(
    spec: &AlgorithmSpec,
    features: ArrayView2<f64>,
    labels: &[Label],
) -> Result<TrainedModel, ClassifierError> {
    spec.validate()?;
    let (n, dim) = features.dim();
    if n == 0 {
        return Err(ClassifierError::Empty);
    }
    if n != labels.len() {
        return Err(ClassifierError::LengthMismatch {
            rows: n,
            labels: labels.len(),
        });
    }
    check_finite(features)?;

    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ClassifierError::SingleClass(classes[0]));
    }
    let y: Vec<usize> = labels.iter().map(|l| classes.binary_search(l).unwrap()).collect();
    let k = classes.len();

    let hp = &spec.hyperparams;
    let scaler = if spec.algorithm.uses_scaler(hp) {
        Some(Scaler::fit(features)?)
    } else {
        None
    };
    let scaled;
    let x = match &scaler {
        Some(s) => {
            scaled = s.transform(features);
            scaled.view()
        }
        None => features,
    };

    let state = match spec.algorithm {
        Algorithm::Knn => ModelState::Knn(knn::KnnModel::fit(x, &y, hp.get("k") as usize)),
        Algorithm::NearestCentroid => ModelState::Centroid(centroid::CentroidModel::fit(x, &y, k)),
        Algorithm::LogisticRegression => {
            let fit = logistic::fit(x, &y, k, &logistic::LogisticParams::from_hyperparams(hp));
            ModelState::Logistic(fit.model)
        }
        Algorithm::LinearSvmOvr => ModelState::Svm(svm::SvmModel::fit(
            x,
            &y,
            k,
            hp.get("lr"),
            hp.get("c"),
            hp.get("iters") as usize,
        )),
        Algorithm::GaussianNaiveBayes => {
            ModelState::NaiveBayes(naive_bayes::GaussianNb::fit(x, &y, k, hp.get("var_smoothing")))
        }
        Algorithm::RandomForest => {
            let params = ForestParams::from_hyperparams(hp);
            ModelState::Forest(Forest::fit(x, &y, k, &params, spec.seed))
        }
        Algorithm::DummyMostFrequent => {
            let mut counts = vec![0usize; k];
            for &c in &y {
                counts[c] += 1;
            }
            ModelState::Dummy {
                class: argmax_first(counts.iter().map(|&c| c as f64)),
            }
        }
    };

    Ok(TrainedModel {
        spec: spec.clone(),
        classes,
        dim,
        scaler,
        state,
    })
}

impl TrainedModel {
    pub fn spec(&self) -> &AlgorithmSpec {
        &self.spec
    }

    pub fn algorithm(&self) -> Algorithm {
        self.spec.algorithm
    }

    /// Class labels seen in training, ascending.
    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scaler(&self) -> Option<&Scaler> {
        self.scaler.as_ref()
    }

    /// M × K score matrix; columns follow [`classes`](Self::classes).
    pub fn predict_scores(&self, features: ArrayView2<f64>) -> Result<Array2<f64>, ClassifierError> {
        if features.ncols() != self.dim {
            return Err(ClassifierError::DimensionMismatch {
                expected: self.dim,
                found: features.ncols(),
            });
        }
        let scaled;
        let x = match &self.scaler {
            Some(s) => {
                scaled = s.transform(features);
                scaled.view()
            }
            None => features,
        };
        let k = self.classes.len();
        Ok(match &self.state {
            ModelState::Knn(m) => m.scores(x, k),
            ModelState::Centroid(m) => m.scores(x),
            ModelState::Logistic(m) => m.probabilities(x),
            ModelState::Svm(m) => m.margins(x),
            ModelState::NaiveBayes(m) => m.probabilities(x),
            ModelState::Forest(f) => f.vote_fractions(x, k),
            ModelState::Dummy { class } => {
                let mut s = Array2::zeros((x.nrows(), k));
                s.column_mut(*class).fill(1.0);
                s
            }
        })
    }

    pub fn predict(&self, features: ArrayView2<f64>) -> Result<Vec<Label>, ClassifierError> {
        let scores = self.predict_scores(features)?;
        Ok(scores
            .rows()
            .into_iter()
            .map(|row| self.classes[argmax_first(row.iter().copied())])
            .collect())
    }

    /// Per-tree predicted labels (`trees × M`) for random forests.
    pub fn tree_votes(&self, features: ArrayView2<f64>) -> Option<Vec<Vec<Label>>> {
        let ModelState::Forest(f) = &self.state else {
            return None;
        };
        Some(
            f.trees()
                .iter()
                .map(|t| {
                    features
                        .rows()
                        .into_iter()
                        .map(|r| self.classes[t.predict_row(r)])
                        .collect()
                })
                .collect(),
        )
    }

    /// Serializes the model to the versioned text format.
    pub fn to_text(&self) -> String {
        serialize::write(self)
    }

    pub fn from_text(text: &str) -> Result<Self, ClassifierError> {
        serialize::read(text)
    }
}

/// Index of the first maximum. NaN never wins.
pub(crate) fn argmax_first<I: IntoIterator<Item = f64>>(values: I) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}

fn check_finite(x: ArrayView2<f64>) -> Result<(), ClassifierError> {
    match x.indexed_iter().find(|(_, v)| !v.is_finite()) {
        Some(((row, col), _)) => Err(ClassifierError::NonFinite { row, col }),
        None => Ok(()),
    }
}

/// Row-wise softmax, in place.
pub(crate) fn softmax_rows(scores: &mut Array2<f64>) {
    for mut row in scores.rows_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum: f64 = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

pub(crate) fn sq_dist<'a, I: IntoIterator<Item = &'a f64>>(a: I, b: I) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn spec_defaults_and_overrides() {
        let s = AlgorithmSpec::new(Algorithm::LogisticRegression);
        assert_eq!((s.get("lr"), s.get("l2"), s.get("iters")), (0.1, 1e-4, 500.0));
        let s = s.set("iters", 50.0).unwrap();
        assert_eq!(s.get("iters"), 50.0);
        assert!(matches!(
            AlgorithmSpec::new(Algorithm::Knn).set("k", 0.0),
            Err(ClassifierError::InvalidHyperparam { .. })
        ));
        assert!(matches!(
            AlgorithmSpec::new(Algorithm::Knn).set("trees", 3.0),
            Err(ClassifierError::UnknownHyperparam { .. })
        ));
        assert!(AlgorithmSpec::new(Algorithm::RandomForest).set("trees", 2.5).is_err());
        assert!(AlgorithmSpec::new(Algorithm::LinearSvmOvr).set("lr", -1.0).is_err());
    }

    #[test]
    fn algorithm_tags_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.tag().parse::<Algorithm>().unwrap(), a);
        }
        assert!("xgboost".parse::<Algorithm>().is_err());
    }

    #[test]
    fn dummy_predicts_mode() {
        let x = array![[0.0], [1.0], [2.0]];
        let m = train(&AlgorithmSpec::new(Algorithm::DummyMostFrequent), x.view(), &[0, 0, 1]).unwrap();
        let q = array![[5.0], [-3.0]];
        assert_eq!(m.predict(q.view()).unwrap(), vec![0, 0]);
        assert_eq!(m.predict_scores(q.view()).unwrap(), array![[1.0, 0.0], [1.0, 0.0]]);
    }

    #[test]
    fn dummy_tie_goes_to_lower_label() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let m = train(
            &AlgorithmSpec::new(Algorithm::DummyMostFrequent),
            x.view(),
            &[1, -1, 1, -1],
        )
        .unwrap();
        assert_eq!(m.predict(x.view()).unwrap(), vec![-1; 4]);
    }

    #[test]
    fn training_errors() {
        let x = array![[0.0], [1.0]];
        let spec = AlgorithmSpec::new(Algorithm::Knn);
        assert_eq!(train(&spec, x.view(), &[1, 1]), Err(ClassifierError::SingleClass(1)));
        assert_eq!(
            train(&spec, x.view(), &[1]),
            Err(ClassifierError::LengthMismatch { rows: 2, labels: 1 })
        );
        let bad = array![[0.0], [f64::INFINITY]];
        assert_eq!(
            train(&spec, bad.view(), &[0, 1]),
            Err(ClassifierError::NonFinite { row: 1, col: 0 })
        );
        let empty = Array2::<f64>::zeros((0, 2));
        assert_eq!(train(&spec, empty.view(), &[]), Err(ClassifierError::Empty));
    }

    #[test]
    fn predict_checks_dimension() {
        let x = array![[0.0, 1.0], [1.0, 0.0]];
        for a in Algorithm::ALL {
            let m = train(&AlgorithmSpec::new(a), x.view(), &[0, 1]).unwrap();
            let q = array![[0.0, 1.0, 2.0]];
            assert_eq!(
                m.predict(q.view()),
                Err(ClassifierError::DimensionMismatch { expected: 2, found: 3 })
            );
        }
    }
}
