//! Flat `key = value` experiment configuration.
//!
//! ```text
//! manifest = data/manifest.csv
//! captions = data/captions
//! embedding.glove100 = vectors/glove.6B.100d.txt
//! topics = vaccines,911
//! task = both
//! test_fraction = 0.15
//! smote.k = 5
//! algorithms = knn,logistic_regression,random_forest
//! knn.k = 7
//! t_values = 5,10,15
//! seed = 42
//! out = runs/first
//! ```
//!
//! Relative paths resolve against the config file's directory. Lines starting
//! with `#` are comments. `<algorithm>.<key>` lines override hyperparameters.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::classifier::{Algorithm, AlgorithmSpec, ClassifierError};
use crate::corpus::Topic;
use crate::evaluation::Task;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error("config: {0}")]
    Hyperparam(#[from] ClassifierError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskSelection {
    ThreeClass,
    Binary,
    Both,
}

impl TaskSelection {
    pub fn tasks(&self) -> Vec<Task> {
        match self {
            TaskSelection::ThreeClass => vec![Task::ThreeClass],
            TaskSelection::Binary => vec![Task::Binary],
            TaskSelection::Both => vec![Task::ThreeClass, Task::Binary],
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "three" | "three_class" => Ok(TaskSelection::ThreeClass),
            "binary" => Ok(TaskSelection::Binary),
            "both" => Ok(TaskSelection::Both),
            _ => Err(format!("task must be three, binary or both, got `{s}`")),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            TaskSelection::ThreeClass => "three",
            TaskSelection::Binary => "binary",
            TaskSelection::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub manifest: PathBuf,
    pub captions_root: PathBuf,
    /// Embedding name → file.
    pub embeddings: BTreeMap<String, PathBuf>,
    pub lowercase_embeddings: bool,
    pub stopwords: Option<PathBuf>,
    pub topics: Vec<Topic>,
    pub task: TaskSelection,
    pub test_fraction: f64,
    pub smote_k: usize,
    /// Learners to sweep; the dummy baseline always runs in addition.
    pub algorithms: Vec<AlgorithmSpec>,
    pub top_t: Vec<usize>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            manifest: PathBuf::new(),
            captions_root: PathBuf::new(),
            embeddings: BTreeMap::new(),
            lowercase_embeddings: false,
            stopwords: None,
            topics: Topic::ALL.to_vec(),
            task: TaskSelection::Both,
            test_fraction: 0.15,
            smote_k: 5,
            algorithms: Algorithm::SUITE.iter().map(|&a| AlgorithmSpec::new(a)).collect(),
            top_t: vec![5, 10, 15],
            seed: 0,
            out_dir: PathBuf::from("capsift-out"),
        }
    }
}

fn parse_list<T, E: ToString>(value: &str, f: impl Fn(&str) -> Result<T, E>) -> Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| f(s).map_err(|e| e.to_string()))
        .collect()
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig {
            out_dir: base_dir.join("capsift-out"),
            ..ExperimentConfig::default()
        };
        let mut overrides = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Line {
                    line: i + 1,
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let located = |message: String| ConfigError::Line { line: i + 1, message };
            match cfg.set(key, value, base_dir) {
                Ok(true) => {}
                Ok(false) => overrides.push((i + 1, key.to_string(), value.to_string())),
                Err(message) => return Err(located(message)),
            }
        }
        // hyperparameter overrides apply after the algorithm list is known
        for (line, key, value) in overrides {
            cfg.set_hyperparam(&key, &value)
                .map_err(|message| ConfigError::Line { line, message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one setting. Returns `Ok(false)` when the key is an
    /// `<algorithm>.<hyperparam>` override that must wait for the algorithm list.
    pub fn set(&mut self, key: &str, value: &str, base_dir: &Path) -> Result<bool, String> {
        let path = |v: &str| base_dir.join(v);
        match key {
            "manifest" => self.manifest = path(value),
            "captions" => self.captions_root = path(value),
            "stopwords" => self.stopwords = Some(path(value)),
            "out" => self.out_dir = path(value),
            "embedding_lowercase" => {
                self.lowercase_embeddings = value
                    .parse()
                    .map_err(|_| format!("embedding_lowercase must be true or false, got `{value}`"))?
            }
            "topics" => {
                self.topics = if value == "all" {
                    Topic::ALL.to_vec()
                } else {
                    parse_list(value, str::parse::<Topic>)?
                }
            }
            "task" => self.task = TaskSelection::parse(value)?,
            "test_fraction" => {
                self.test_fraction = value
                    .parse()
                    .map_err(|_| format!("test_fraction `{value}` is not a number"))?
            }
            "smote.k" => {
                self.smote_k = value
                    .parse()
                    .map_err(|_| format!("smote.k `{value}` is not a positive integer"))?
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| format!("seed `{value}` is not an unsigned integer"))?
            }
            "t_values" => {
                self.top_t = parse_list(value, |s| s.parse::<usize>().map_err(|_| format!("bad T value `{s}`")))?
            }
            "algorithms" => {
                let algos = parse_list(value, str::parse::<Algorithm>)?;
                self.algorithms = algos.into_iter().map(AlgorithmSpec::new).collect();
            }
            _ => {
                if let Some(name) = key.strip_prefix("embedding.") {
                    if name.is_empty() || name.contains(',') {
                        return Err(format!("bad embedding name `{name}`"));
                    }
                    self.embeddings.insert(name.to_string(), path(value));
                } else if key.contains('.') {
                    return Ok(false);
                } else {
                    return Err(format!("unknown key `{key}`"));
                }
            }
        }
        Ok(true)
    }

    fn set_hyperparam(&mut self, key: &str, value: &str) -> Result<(), String> {
        let (algo, param) = key.split_once('.').unwrap();
        let algorithm: Algorithm = algo.parse().map_err(|e: ClassifierError| e.to_string())?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("hyperparameter `{key}` value `{value}` is not a number"))?;
        let spec = self
            .algorithms
            .iter_mut()
            .find(|s| s.algorithm == algorithm)
            .ok_or_else(|| format!("`{key}` refers to {algorithm}, which is not in the algorithm list"))?;
        *spec = spec.clone().set(param, value).map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return invalid("test_fraction must be strictly between 0 and 1");
        }
        if self.embeddings.is_empty() {
            return invalid("at least one `embedding.<name>` is required");
        }
        if self.topics.is_empty() {
            return invalid("at least one topic is required");
        }
        if self.algorithms.is_empty() {
            return invalid("at least one algorithm is required");
        }
        if self.algorithms.iter().any(|s| s.algorithm.is_dummy()) {
            return invalid("the dummy baseline always runs and cannot be listed");
        }
        let mut algos: Vec<_> = self.algorithms.iter().map(|s| s.algorithm).collect();
        algos.sort();
        if algos.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate algorithm in list");
        }
        if self.smote_k == 0 {
            return invalid("smote.k must be at least 1");
        }
        if self.top_t.is_empty() || self.top_t.contains(&0) {
            return invalid("t_values must be a nonempty list of positive integers");
        }
        if self.manifest.as_os_str().is_empty() || self.captions_root.as_os_str().is_empty() {
            return invalid("manifest and captions are required");
        }
        Ok(())
    }

    /// Canonical text of the fully resolved configuration.
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        let list = |v: Vec<String>| v.join(",");
        writeln!(out, "manifest = {}", self.manifest.display()).unwrap();
        writeln!(out, "captions = {}", self.captions_root.display()).unwrap();
        for (name, path) in &self.embeddings {
            writeln!(out, "embedding.{name} = {}", path.display()).unwrap();
        }
        writeln!(out, "embedding_lowercase = {}", self.lowercase_embeddings).unwrap();
        if let Some(sw) = &self.stopwords {
            writeln!(out, "stopwords = {}", sw.display()).unwrap();
        }
        writeln!(
            out,
            "topics = {}",
            list(self.topics.iter().map(|t| t.to_string()).collect())
        )
        .unwrap();
        writeln!(out, "task = {}", self.task.as_str()).unwrap();
        writeln!(out, "test_fraction = {:?}", self.test_fraction).unwrap();
        writeln!(out, "smote.k = {}", self.smote_k).unwrap();
        writeln!(
            out,
            "t_values = {}",
            list(self.top_t.iter().map(|t| t.to_string()).collect())
        )
        .unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        writeln!(out, "out = {}", self.out_dir.display()).unwrap();
        writeln!(
            out,
            "algorithms = {}",
            list(self.algorithms.iter().map(|s| s.algorithm.tag().to_string()).collect())
        )
        .unwrap();
        for spec in &self.algorithms {
            for (k, v) in spec.hyperparams().iter() {
                writeln!(out, "{}.{k} = {v:?}", spec.algorithm).unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "
# comment
manifest = m.csv
captions = caps
embedding.glove = g.txt
topics = vaccines, flatearth
task = binary
seed = 9
algorithms = knn,random_forest
knn.k = 3
random_forest.trees = 20
t_values = 1,2
";

    #[test]
    fn parses_and_resolves_paths() {
        let cfg = ExperimentConfig::parse(BASIC, Path::new("/base")).unwrap();
        assert_eq!(cfg.manifest, PathBuf::from("/base/m.csv"));
        assert_eq!(cfg.embeddings["glove"], PathBuf::from("/base/g.txt"));
        assert_eq!(cfg.topics, vec![Topic::VaccinesControversy, Topic::FlatEarth]);
        assert_eq!(cfg.task, TaskSelection::Binary);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.test_fraction, 0.15);
        assert_eq!(cfg.algorithms[0].get("k"), 3.0);
        assert_eq!(cfg.algorithms[1].get("trees"), 20.0);
        assert_eq!(cfg.top_t, vec![1, 2]);
    }

    #[test]
    fn resolved_text_reparses_to_same_config() {
        let cfg = ExperimentConfig::parse(BASIC, Path::new("/base")).unwrap();
        let again = ExperimentConfig::parse(&cfg.resolved_text(), Path::new("/elsewhere")).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn errors_point_at_lines() {
        let err = ExperimentConfig::parse("manifest = a\nbogus = 1\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Line { line: 2, .. }));
        let err = ExperimentConfig::parse("no equals sign\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Line { line: 1, .. }));
        let text = format!("{BASIC}gaussian_nb.var_smoothing = 1e-3\n");
        assert!(matches!(
            ExperimentConfig::parse(&text, Path::new(".")),
            Err(ConfigError::Line { .. })
        ));
    }

    #[test]
    fn validation() {
        let bad_fraction = format!("{BASIC}test_fraction = 1.0\n");
        assert!(matches!(
            ExperimentConfig::parse(&bad_fraction, Path::new(".")),
            Err(ConfigError::Invalid(_))
        ));
        let no_embedding = BASIC.replace("embedding.glove = g.txt", "");
        assert!(ExperimentConfig::parse(&no_embedding, Path::new(".")).is_err());
        let dup = BASIC.replace("knn,random_forest", "knn,knn");
        assert!(ExperimentConfig::parse(&dup, Path::new(".")).is_err());
        let dummy = BASIC.replace("knn,random_forest", "knn,dummy_most_frequent");
        assert!(ExperimentConfig::parse(&dummy, Path::new(".")).is_err());
    }
}
