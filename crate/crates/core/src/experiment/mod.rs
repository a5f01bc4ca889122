//! Per-topic experiment runs: configuration, splitting, orchestration and
//! report files.

use thiserror::Error;

mod config;
mod report;
mod runner;
mod split;

pub use config::{ConfigError, ExperimentConfig, TaskSelection};
pub use report::{
    emit_report, parse_embedding_scores_csv, parse_reports_csv, render_best_models, render_embedding_scores,
    render_exclusions, render_reports, ReportError, ReportRecord, ScoreRecord,
};
pub use runner::{
    cell_seed, config_fingerprint, run_experiment, BestModel, CellFailure, Exclusion, ExclusionStage, ReportRow,
    RunMetadata, RunResult, ScoreRow, SkippedTopic, SplitAudit, DUMMY_STRATEGY,
};
pub use split::{binarize_labels, stratified_split, Split, SplitError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Embedding(#[from] crate::embedding::EmbeddingError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Evaluation(#[from] crate::evaluation::EvaluationError),
}
