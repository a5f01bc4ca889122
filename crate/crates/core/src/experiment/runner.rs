use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use super::split::{binarize_labels, stratified_split, Split};
use super::ExperimentError;
use crate::classifier::{train, Algorithm, AlgorithmSpec, TrainedModel};
use crate::corpus::{filter_corpus, load_caption, load_manifest, CaptionDocument, CaptionLoad, StopWords, Topic};
use crate::embedding::{parse_embedding_file, vectorize_caption, EmbeddingTable, ParseOptions};
use crate::evaluation::{compare_reports, embedding_performance, EmbeddingScore, EvaluationReport, Task};
use crate::resampling::{smote, SmoteParams, RNG_ALGORITHM};
use crate::Label;

/// Strategy of the always-on baseline, printed next to its scores.
pub const DUMMY_STRATEGY: &str = "most_frequent";

/// Derives a reproducible seed for one pipeline cell from the master seed.
pub fn cell_seed(master: u64, parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Short hex digest of the resolved configuration.
pub fn config_fingerprint(cfg: &ExperimentConfig) -> String {
    hex::encode(&Sha256::digest(cfg.resolved_text().as_bytes())[..8])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExclusionStage {
    Caption,
    Filter,
    Vectorize,
}

impl fmt::Display for ExclusionStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionStage::Caption => "caption",
            ExclusionStage::Filter => "filter",
            ExclusionStage::Vectorize => "vectorize",
        })
    }
}

/// A video dropped before training.
#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub topic: Topic,
    pub video_id: String,
    pub stage: ExclusionStage,
    pub embedding: Option<String>,
    pub reason: String,
}

/// A (topic, task, embedding, model) cell that produced no report.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub topic: Topic,
    pub task: Task,
    pub embedding: String,
    pub model: String,
    pub reason: String,
}

/// A topic (or topic × embedding) that could not be run at all.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedTopic {
    pub topic: Topic,
    pub embedding: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub topic: Topic,
    pub seed: u64,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub topic: Topic,
    pub task: Task,
    pub score: EmbeddingScore,
}

/// Best non-dummy model of one (topic, task), with the dummy baseline for
/// the same embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct BestModel {
    pub topic: Topic,
    pub task: Task,
    pub best: ReportRow,
    pub baseline: Option<ReportRow>,
}

/// Video ids on each side of one (topic, task, embedding) split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitAudit {
    pub topic: Topic,
    pub task: Task,
    pub embedding: String,
    /// Rows handed to SMOTE.
    pub resampled_ids: Vec<String>,
    /// Rows the models were scored on.
    pub evaluated_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub fingerprint: String,
    pub rng_algorithm: &'static str,
    pub dummy_strategy: &'static str,
    pub master_seed: u64,
    pub test_fraction: f64,
    pub smote_k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub metadata: RunMetadata,
    pub resolved_config: String,
    /// Sorted by topic, task, embedding, model.
    pub reports: Vec<ReportRow>,
    pub embedding_scores: Vec<ScoreRow>,
    pub best_models: Vec<BestModel>,
    pub exclusions: Vec<Exclusion>,
    pub failures: Vec<CellFailure>,
    pub skipped: Vec<SkippedTopic>,
    pub audits: Vec<SplitAudit>,
}

impl RunResult {
    /// Some topic, embedding or cell did not produce results.
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty() || !self.skipped.is_empty()
    }
}

struct Corpus {
    topic: Topic,
    docs: Vec<CaptionDocument>,
}

/// Caption vectors of one topic under one embedding.
struct Vectorized {
    ids: Vec<String>,
    features: Array2<f64>,
    labels: Vec<Label>,
}

fn vectorize_topic(corpus: &Corpus, name: &str, table: &EmbeddingTable, exclusions: &mut Vec<Exclusion>) -> Vectorized {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for doc in &corpus.docs {
        let cv = vectorize_caption(table, &doc.tokens);
        match cv.vector {
            Some(v) => {
                ids.push(doc.record.video_id.clone());
                labels.push(doc.record.label.value());
                data.extend(v);
            }
            None => exclusions.push(Exclusion {
                topic: corpus.topic,
                video_id: doc.record.video_id.clone(),
                stage: ExclusionStage::Vectorize,
                embedding: Some(name.to_string()),
                reason: format!("no in-vocabulary tokens ({} tokens)", cv.tokens_total),
            }),
        }
    }
    let features = Array2::from_shape_vec((ids.len(), table.dim()), data).expect("rows have table dimension");
    Vectorized { ids, features, labels }
}

fn label_problem(labels: &[Label]) -> Option<String> {
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    if counts.len() < 2 {
        return Some(format!("only {} class(es) present after filtering", counts.len()));
    }
    counts
        .iter()
        .find(|(_, &c)| c < 2)
        .map(|(l, c)| format!("class {l} has {c} sample(s) after filtering; need at least 2"))
}

struct CellOutput {
    reports: Vec<ReportRow>,
    failures: Vec<CellFailure>,
    audit: Option<SplitAudit>,
}

fn model_report(
    model: &TrainedModel,
    task: Task,
    embedding: &str,
    x_test: &Array2<f64>,
    y_test: &[Label],
) -> Result<EvaluationReport, String> {
    let tag = model.algorithm().tag();
    let scores = model.predict_scores(x_test.view()).map_err(|e| e.to_string())?;
    let pred = model.predict(x_test.view()).map_err(|e| e.to_string())?;
    match task {
        Task::ThreeClass => {
            let mut classes = model.classes().to_vec();
            classes.extend_from_slice(y_test);
            classes.sort_unstable();
            classes.dedup();
            EvaluationReport::three_class(tag, embedding, &classes, y_test, &pred)
        }
        Task::Binary => {
            let col = model
                .classes()
                .iter()
                .position(|&c| c == 1)
                .ok_or("model never saw the misinformation class")?;
            let positive = scores.column(col).to_vec();
            EvaluationReport::binary(tag, embedding, y_test, &pred, &positive)
        }
    }
    .map_err(|e| e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn run_cell(
    cfg: &ExperimentConfig,
    topic: Topic,
    task: Task,
    embedding: &str,
    data: &Vectorized,
    split: &Split,
    labels: &[Label],
    specs: &[AlgorithmSpec],
) -> CellOutput {
    let topic_s = topic.as_str();
    let task_s = task.as_str();
    let x_train = Split::select_rows(data.features.view(), &split.train);
    let y_train = Split::select_labels(labels, &split.train);
    let x_test = Split::select_rows(data.features.view(), &split.test);
    let y_test = Split::select_labels(labels, &split.test);

    let fail_all = |reason: String| CellOutput {
        reports: Vec::new(),
        failures: specs
            .iter()
            .map(|s| CellFailure {
                topic,
                task,
                embedding: embedding.to_string(),
                model: s.algorithm.tag().to_string(),
                reason: reason.clone(),
            })
            .collect(),
        audit: None,
    };

    let params = SmoteParams {
        k_neighbors: cfg.smote_k,
        seed: cell_seed(cfg.seed, &[topic_s, task_s, embedding, "smote"]),
    };
    let resampled = match smote(x_train.view(), &y_train, params) {
        Ok(r) => r,
        Err(e) => return fail_all(format!("smote: {e}")),
    };
    let audit = SplitAudit {
        topic,
        task,
        embedding: embedding.to_string(),
        resampled_ids: split.train.iter().map(|&i| data.ids[i].clone()).collect(),
        evaluated_ids: split.test.iter().map(|&i| data.ids[i].clone()).collect(),
    };

    let outcomes: Vec<(u64, Result<EvaluationReport, String>)> = specs
        .par_iter()
        .map(|spec| {
            let seed = cell_seed(cfg.seed, &[topic_s, task_s, embedding, spec.algorithm.tag()]);
            let spec = spec.clone().with_seed(seed);
            // the majority baseline is meaningless on class-balanced rows
            let fitted = if spec.algorithm.is_dummy() {
                train(&spec, x_train.view(), &y_train)
            } else {
                train(&spec, resampled.features.view(), &resampled.labels)
            };
            let outcome = fitted
                .map_err(|e| e.to_string())
                .and_then(|m| model_report(&m, task, embedding, &x_test, &y_test));
            (seed, outcome)
        })
        .collect();

    let mut out = CellOutput {
        reports: Vec::new(),
        failures: Vec::new(),
        audit: Some(audit),
    };
    for (spec, (seed, outcome)) in specs.iter().zip(outcomes) {
        match outcome {
            Ok(report) => out.reports.push(ReportRow { topic, seed, report }),
            Err(reason) => out.failures.push(CellFailure {
                topic,
                task,
                embedding: embedding.to_string(),
                model: spec.algorithm.tag().to_string(),
                reason,
            }),
        }
    }
    out
}

fn row_order(a: &ReportRow, b: &ReportRow) -> std::cmp::Ordering {
    (a.topic, a.report.task, &a.report.embedding, &a.report.model).cmp(&(
        b.topic,
        b.report.task,
        &b.report.embedding,
        &b.report.model,
    ))
}

/// Runs the full pipeline for every configured topic, task and embedding.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, ExperimentError> {
    cfg.validate()?;
    let records = load_manifest(&cfg.manifest)?;
    let stopwords = match &cfg.stopwords {
        Some(p) => StopWords::from_file(p)?,
        None => StopWords::english(),
    };
    let opts = ParseOptions {
        expected_dim: None,
        lowercase_keys: cfg.lowercase_embeddings,
    };
    let tables: Vec<(String, EmbeddingTable)> = cfg
        .embeddings
        .par_iter()
        .map(|(name, path)| parse_embedding_file(path, &opts).map(|t| (name.clone(), t)))
        .collect::<Result<_, _>>()?;

    let mut specs = cfg.algorithms.clone();
    specs.push(AlgorithmSpec::new(Algorithm::DummyMostFrequent));
    let tasks = cfg.task.tasks();

    let mut exclusions = Vec::new();
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    let mut reports = Vec::new();
    let mut audits = Vec::new();

    for &topic in &cfg.topics {
        let mut docs = Vec::new();
        for rec in records.iter().filter(|r| r.topic == topic) {
            match load_caption(rec, &cfg.captions_root)? {
                CaptionLoad::Loaded { text, .. } => docs.push(CaptionDocument::new(rec.clone(), text, &stopwords)),
                CaptionLoad::Skipped { video_id, reason } => exclusions.push(Exclusion {
                    topic,
                    video_id,
                    stage: ExclusionStage::Caption,
                    embedding: None,
                    reason,
                }),
            }
        }
        let filtered = filter_corpus(docs);
        exclusions.extend(filtered.rejections.into_iter().map(|r| Exclusion {
            topic,
            video_id: r.video_id,
            stage: ExclusionStage::Filter,
            embedding: None,
            reason: r.reason.to_string(),
        }));
        let corpus = Corpus {
            topic,
            docs: filtered.retained,
        };
        if let Some(reason) = label_problem(&corpus.docs.iter().map(|d| d.record.label.value()).collect::<Vec<_>>()) {
            skipped.push(SkippedTopic {
                topic,
                embedding: None,
                reason,
            });
            continue;
        }

        for (name, table) in &tables {
            let data = vectorize_topic(&corpus, name, table, &mut exclusions);
            if let Some(reason) = label_problem(&data.labels) {
                skipped.push(SkippedTopic {
                    topic,
                    embedding: Some(name.clone()),
                    reason,
                });
                continue;
            }
            // one split per (topic, embedding), shared by both tasks
            let split_seed = cell_seed(cfg.seed, &[topic.as_str(), name, "split"]);
            let split = stratified_split(&data.labels, cfg.test_fraction, split_seed)?;

            for &task in &tasks {
                let labels = match task {
                    Task::ThreeClass => data.labels.clone(),
                    Task::Binary => binarize_labels(&data.labels)?,
                };
                let out = run_cell(cfg, topic, task, name, &data, &split, &labels, &specs);
                reports.extend(out.reports);
                failures.extend(out.failures);
                audits.extend(out.audit);
            }
        }
    }

    reports.sort_by(row_order);

    let mut embedding_scores = Vec::new();
    let mut best_models = Vec::new();
    let mut groups: BTreeMap<(Topic, Task), Vec<&ReportRow>> = BTreeMap::new();
    for r in &reports {
        groups.entry((r.topic, r.report.task)).or_default().push(r);
    }
    for ((topic, task), rows) in groups {
        let learners: Vec<EvaluationReport> = rows
            .iter()
            .filter(|r| r.report.model != Algorithm::DummyMostFrequent.tag())
            .map(|r| r.report.clone())
            .collect();
        if learners.is_empty() {
            continue;
        }
        for &t in &cfg.top_t {
            for score in embedding_performance(&learners, t)? {
                embedding_scores.push(ScoreRow { topic, task, score });
            }
        }
        let best = rows
            .iter()
            .filter(|r| r.report.model != Algorithm::DummyMostFrequent.tag())
            .min_by(|a, b| {
                compare_reports(&a.report, &b.report).then_with(|| a.report.embedding.cmp(&b.report.embedding))
            })
            .map(|r| (*r).clone())
            .unwrap();
        let baseline = rows
            .iter()
            .find(|r| {
                r.report.model == Algorithm::DummyMostFrequent.tag() && r.report.embedding == best.report.embedding
            })
            .map(|r| (*r).clone());
        best_models.push(BestModel {
            topic,
            task,
            best,
            baseline,
        });
    }
    embedding_scores.sort_by(|a, b| {
        (a.topic, a.task, &a.score.embedding, a.score.top).cmp(&(b.topic, b.task, &b.score.embedding, b.score.top))
    });

    Ok(RunResult {
        metadata: RunMetadata {
            fingerprint: config_fingerprint(cfg),
            rng_algorithm: RNG_ALGORITHM,
            dummy_strategy: DUMMY_STRATEGY,
            master_seed: cfg.seed,
            test_fraction: cfg.test_fraction,
            smote_k: cfg.smote_k,
        },
        resolved_config: cfg.resolved_text(),
        reports,
        embedding_scores,
        best_models,
        exclusions,
        failures,
        skipped,
        audits,
    })
}
