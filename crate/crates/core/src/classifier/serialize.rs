//! Flat text model format.
//!
//! ```text
//! capsift-model 1
//! algorithm logistic_regression
//! seed 42
//! dim 3
//! classes -1 0 1
//! hyper iters 500
//! scaler.mean 0.1 0.2 0.3
//! weights ...
//! end
//! ```
//!
//! One `key values...` record per line. Floats use the shortest decimal form
//! that parses back to the same bits. Forest trees are written as a `tree <n>`
//! line followed by `n` node lines (`split <feature> <threshold> <left> <right>`
//! or `leaf <class>`).

use std::collections::HashMap;
use std::fmt::{Display, Write};
use std::str::FromStr;

use ndarray::{Array1, Array2};

use super::centroid::CentroidModel;
use super::forest::{DecisionTree, Forest, Node};
use super::knn::KnnModel;
use super::logistic::LogisticModel;
use super::naive_bayes::GaussianNb;
use super::svm::SvmModel;
use super::{Algorithm, AlgorithmSpec, ClassifierError, ModelState, Scaler, TrainedModel};

const MAGIC: &str = "capsift-model";
const VERSION: u32 = 1;

fn line<T: Display>(out: &mut String, key: &str, values: impl IntoIterator<Item = T>) {
    out.push_str(key);
    for v in values {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
}

fn floats(out: &mut String, key: &str, values: impl IntoIterator<Item = f64>) {
    out.push_str(key);
    for v in values {
        write!(out, " {v:?}").unwrap();
    }
    out.push('\n');
}

pub(super) fn write(model: &TrainedModel) -> String {
    let mut out = String::new();
    line(&mut out, MAGIC, [VERSION]);
    line(&mut out, "algorithm", [model.spec.algorithm.tag()]);
    line(&mut out, "seed", [model.spec.seed]);
    line(&mut out, "dim", [model.dim]);
    line(&mut out, "classes", &model.classes);
    for (k, v) in model.spec.hyperparams.iter() {
        out.push_str("hyper ");
        out.push_str(k);
        writeln!(out, " {v:?}").unwrap();
    }
    if let Some(s) = &model.scaler {
        floats(&mut out, "scaler.mean", s.mean.iter().copied());
        floats(&mut out, "scaler.std", s.std.iter().copied());
    }
    match &model.state {
        ModelState::Knn(m) => {
            line(&mut out, "rows", [m.points.nrows()]);
            line(&mut out, "labels", &m.labels);
            floats(&mut out, "points", m.points.iter().copied());
        }
        ModelState::Centroid(m) => floats(&mut out, "centroids", m.centroids.iter().copied()),
        ModelState::Logistic(m) => {
            floats(&mut out, "weights", m.weights.iter().copied());
            floats(&mut out, "bias", m.bias.iter().copied());
        }
        ModelState::Svm(m) => {
            floats(&mut out, "weights", m.weights.iter().copied());
            floats(&mut out, "bias", m.bias.iter().copied());
        }
        ModelState::NaiveBayes(m) => {
            floats(&mut out, "means", m.means.iter().copied());
            floats(&mut out, "variances", m.variances.iter().copied());
            floats(&mut out, "log_priors", m.log_priors.iter().copied());
        }
        ModelState::Forest(f) => {
            line(&mut out, "trees", [f.trees.len()]);
            for t in &f.trees {
                line(&mut out, "tree", [t.nodes.len()]);
                for node in &t.nodes {
                    match *node {
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => writeln!(out, "split {feature} {threshold:?} {left} {right}").unwrap(),
                        Node::Leaf { class } => writeln!(out, "leaf {class}").unwrap(),
                    }
                }
            }
        }
        ModelState::Dummy { class } => line(&mut out, "dummy.class", [class]),
    }
    out.push_str("end\n");
    out
}

struct Record<'a> {
    line: usize,
    key: &'a str,
    values: Vec<&'a str>,
}

struct Reader<'a> {
    records: Vec<Record<'a>>,
    index: HashMap<&'a str, usize>,
}

fn err(line: usize, message: impl Into<String>) -> ClassifierError {
    ClassifierError::Format {
        line,
        message: message.into(),
    }
}

impl<'a> Reader<'a> {
    fn get(&self, key: &str) -> Result<&Record<'a>, ClassifierError> {
        self.index
            .get(key)
            .map(|&i| &self.records[i])
            .ok_or_else(|| err(0, format!("missing `{key}` record")))
    }

    fn parse_all<T: FromStr>(&self, key: &str) -> Result<Vec<T>, ClassifierError> {
        let rec = self.get(key)?;
        parse_values(rec, &rec.values)
    }

    fn one<T: FromStr>(&self, key: &str) -> Result<T, ClassifierError> {
        let v = self.parse_all::<T>(key)?;
        let rec = self.get(key)?;
        match <[T; 1]>::try_from(v) {
            Ok([x]) => Ok(x),
            Err(_) => Err(err(rec.line, format!("`{key}` takes exactly one value"))),
        }
    }

    fn matrix(&self, key: &str, rows: usize, cols: usize) -> Result<Array2<f64>, ClassifierError> {
        let v = self.parse_all::<f64>(key)?;
        let line = self.get(key)?.line;
        Array2::from_shape_vec((rows, cols), v)
            .map_err(|_| err(line, format!("`{key}` should hold {rows}×{cols} values")))
    }

    fn vector(&self, key: &str, len: usize) -> Result<Array1<f64>, ClassifierError> {
        Ok(self.matrix(key, 1, len)?.into_shape_with_order(len).unwrap())
    }
}

fn parse_values<T: FromStr>(rec: &Record<'_>, values: &[&str]) -> Result<Vec<T>, ClassifierError> {
    values
        .iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| err(rec.line, format!("bad value `{s}` in `{}`", rec.key)))
        })
        .collect()
}

pub(super) fn read(text: &str) -> Result<TrainedModel, ClassifierError> {
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let mut it = raw.split_whitespace();
        let Some(key) = it.next() else { continue };
        records.push(Record {
            line: i + 1,
            key,
            values: it.collect(),
        });
    }
    let first = records.first().ok_or_else(|| err(1, "empty model text"))?;
    if first.key != MAGIC || first.values != [VERSION.to_string()] {
        return Err(err(first.line, format!("expected `{MAGIC} {VERSION}` header")));
    }
    if records.last().map(|r| r.key) != Some("end") {
        return Err(err(text.lines().count(), "missing `end` record"));
    }

    let mut index = HashMap::new();
    let mut hyper = Vec::new();
    let mut tree_lines = Vec::new();
    for (i, r) in records.iter().enumerate() {
        match r.key {
            "hyper" => hyper.push(i),
            "tree" | "split" | "leaf" => tree_lines.push(i),
            key => {
                if index.insert(key, i).is_some() {
                    return Err(err(r.line, format!("duplicate `{key}` record")));
                }
            }
        }
    }
    let rd = Reader { records, index };

    let algorithm: Algorithm = rd.one::<String>("algorithm")?.parse()?;
    let mut spec = AlgorithmSpec::new(algorithm).with_seed(rd.one("seed")?);
    for &i in &hyper {
        let rec = &rd.records[i];
        let [key, value] = rec.values[..] else {
            return Err(err(rec.line, "`hyper` takes a key and a value"));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| err(rec.line, format!("bad hyperparameter value `{value}`")))?;
        spec = spec.set(key, value)?;
    }
    let dim: usize = rd.one("dim")?;
    let classes: Vec<i32> = rd.parse_all("classes")?;
    let k = classes.len();
    if k < 2 || classes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(err(
            rd.get("classes")?.line,
            "classes must be ascending with at least two entries",
        ));
    }

    let scaler = if rd.index.contains_key("scaler.mean") {
        Some(Scaler {
            mean: rd.vector("scaler.mean", dim)?.to_vec(),
            std: rd.vector("scaler.std", dim)?.to_vec(),
        })
    } else {
        None
    };

    let class_index = |key: &str, v: usize| -> Result<usize, ClassifierError> {
        if v < k {
            Ok(v)
        } else {
            Err(err(
                rd.get(key).map_or(0, |r| r.line),
                format!("class index {v} out of range"),
            ))
        }
    };

    let state = match algorithm {
        Algorithm::Knn => {
            let rows: usize = rd.one("rows")?;
            let labels = rd
                .parse_all::<usize>("labels")?
                .into_iter()
                .map(|v| class_index("labels", v))
                .collect::<Result<Vec<_>, _>>()?;
            if labels.len() != rows {
                return Err(err(rd.get("labels")?.line, "label count does not match rows"));
            }
            ModelState::Knn(KnnModel {
                k: spec.get("k") as usize,
                points: rd.matrix("points", rows, dim)?,
                labels,
            })
        }
        Algorithm::NearestCentroid => ModelState::Centroid(CentroidModel {
            centroids: rd.matrix("centroids", k, dim)?,
        }),
        Algorithm::LogisticRegression => ModelState::Logistic(LogisticModel {
            weights: rd.matrix("weights", k, dim)?,
            bias: rd.vector("bias", k)?,
        }),
        Algorithm::LinearSvmOvr => ModelState::Svm(SvmModel {
            weights: rd.matrix("weights", k, dim)?,
            bias: rd.vector("bias", k)?,
        }),
        Algorithm::GaussianNaiveBayes => ModelState::NaiveBayes(GaussianNb {
            means: rd.matrix("means", k, dim)?,
            variances: rd.matrix("variances", k, dim)?,
            log_priors: rd.vector("log_priors", k)?,
        }),
        Algorithm::RandomForest => {
            let count: usize = rd.one("trees")?;
            ModelState::Forest(read_trees(&rd, &tree_lines, count, k, dim)?)
        }
        Algorithm::DummyMostFrequent => ModelState::Dummy {
            class: class_index("dummy.class", rd.one("dummy.class")?)?,
        },
    };

    Ok(TrainedModel {
        spec,
        classes,
        dim,
        scaler,
        state,
    })
}

fn read_trees(rd: &Reader<'_>, lines: &[usize], count: usize, k: usize, dim: usize) -> Result<Forest, ClassifierError> {
    let mut trees = Vec::with_capacity(count);
    let mut it = lines.iter().map(|&i| &rd.records[i]).peekable();
    while let Some(head) = it.next() {
        if head.key != "tree" {
            return Err(err(head.line, "node record outside a tree"));
        }
        let n: usize = parse_values(head, &head.values)?
            .first()
            .copied()
            .ok_or_else(|| err(head.line, "`tree` needs a node count"))?;
        let mut nodes = Vec::with_capacity(n);
        for _ in 0..n {
            let rec = it.next().ok_or_else(|| err(head.line, "tree is missing nodes"))?;
            let node = match (rec.key, rec.values.as_slice()) {
                ("leaf", [c]) => {
                    let class: usize = parse_values(rec, &[*c])?[0];
                    if class >= k {
                        return Err(err(rec.line, "leaf class out of range"));
                    }
                    Node::Leaf { class }
                }
                ("split", [f, t, l, r]) => {
                    let ints: Vec<usize> = parse_values(rec, &[*f, *l, *r])?;
                    let threshold: f64 = parse_values(rec, &[*t])?[0];
                    if ints[0] >= dim || ints[1] >= n || ints[2] >= n {
                        return Err(err(rec.line, "split index out of range"));
                    }
                    Node::Split {
                        feature: ints[0],
                        threshold,
                        left: ints[1],
                        right: ints[2],
                    }
                }
                _ => return Err(err(rec.line, "malformed tree node")),
            };
            nodes.push(node);
        }
        trees.push(DecisionTree { nodes });
    }
    if trees.len() != count || trees.iter().any(|t| t.nodes.is_empty()) {
        return Err(err(rd.get("trees")?.line, format!("expected {count} non-empty trees")));
    }
    Ok(Forest { trees })
}

#[cfg(test)]
mod tests {
    use super::super::train;
    use super::*;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_algorithm_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = Array2::from_shape_fn((45, 4), |(i, _)| rng.random_range(-1.0..1.0) + (i % 3) as f64 * 1.5);
        let y: Vec<i32> = (0..45).map(|i| (i % 3) - 1).collect();
        let q = Array2::from_shape_fn((30, 4), |_| rng.random_range(-2.0..4.0));
        for a in Algorithm::ALL {
            let spec = AlgorithmSpec::new(a).with_seed(3);
            let spec = if a == Algorithm::RandomForest {
                spec.set("trees", 7.0).unwrap()
            } else {
                spec
            };
            let m = train(&spec, x.view(), &y).unwrap();
            let text = m.to_text();
            let back = TrainedModel::from_text(&text).unwrap();
            assert_eq!(back, m, "{a}");
            assert_eq!(back.predict(q.view()).unwrap(), m.predict(q.view()).unwrap());
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn rejects_bad_text() {
        assert!(matches!(
            TrainedModel::from_text(""),
            Err(ClassifierError::Format { .. })
        ));
        assert!(matches!(
            TrainedModel::from_text("capsift-model 9\nend\n"),
            Err(ClassifierError::Format { line: 1, .. })
        ));
        let dummy = "capsift-model 1\nalgorithm dummy_most_frequent\nseed 0\ndim 1\nclasses 0 1\ndummy.class 5\nend\n";
        assert!(TrainedModel::from_text(dummy).is_err());
        let ok = dummy.replace("dummy.class 5", "dummy.class 1");
        let m = TrainedModel::from_text(&ok).unwrap();
        assert_eq!(m.predict(ndarray::array![[3.0]].view()).unwrap(), vec![1]);
        let truncated = ok.replace("end\n", "");
        assert!(TrainedModel::from_text(&truncated).is_err());
    }
}
