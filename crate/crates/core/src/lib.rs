//! Caption-based misinformation classification.
//!
//! The pipeline turns video caption text into averaged word-embedding vectors,
//! balances the training split with SMOTE, trains a suite of classifiers and
//! scores them with support-weighted precision, recall and F1.
//!
//! Modules follow the pipeline order:
//!
//! * [`corpus`] loads the labelled manifest and caption files and cleans text.
//! * [`embedding`] parses GloVe / word2vec text files and averages token vectors.
//! * [`resampling`] implements SMOTE.
//! * [`classifier`] provides the classifier suite behind one train/predict API.
//! * [`evaluation`] computes confusion matrices, weighted metrics, ROC-AUC and
//!   the top-T embedding score.
//! * [`experiment`] wires everything into per-topic runs and writes reports.

pub mod classifier;
pub mod corpus;
pub mod embedding;
pub mod evaluation;
pub mod experiment;
pub mod resampling;

/// Class label as stored in the manifest: 1, 0, -1 for the three-class task,
/// 1 / 0 for the binary task.
pub type Label = i32;
