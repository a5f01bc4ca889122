use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::runner::{RunResult, ScoreRow};
use crate::corpus::Topic;
use crate::evaluation::{report_csv_row, Task, REPORT_CSV_HEADER};

pub const EMBEDDING_SCORES_HEADER: &str = "topic,task,embedding,T,mu";
pub const SPLITS_HEADER: &str = "topic,task,embedding,side,video_id";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One parsed `reports.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRecord {
    pub topic: Topic,
    pub task: Task,
    pub embedding: String,
    pub model: String,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub auc_roc: Option<f64>,
    pub seed: u64,
}

impl From<&super::runner::ReportRow> for ReportRecord {
    fn from(row: &super::runner::ReportRow) -> Self {
        let r = &row.report;
        ReportRecord {
            topic: row.topic,
            task: r.task,
            embedding: r.embedding.clone(),
            model: r.model.clone(),
            f1: r.metrics.f1,
            precision: r.metrics.precision,
            recall: r.metrics.recall,
            accuracy: r.metrics.accuracy,
            auc_roc: r.auc_roc,
            seed: row.seed,
        }
    }
}

/// One parsed `embedding_scores.csv` row. `mu` carries the written two
/// decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub topic: Topic,
    pub task: Task,
    pub embedding: String,
    pub top: usize,
    pub mu: f64,
}

impl From<&ScoreRow> for ScoreRecord {
    fn from(row: &ScoreRow) -> Self {
        ScoreRecord {
            topic: row.topic,
            task: row.task,
            embedding: row.score.embedding.clone(),
            top: row.score.top,
            mu: format!("{:.2}", row.score.mu).parse().unwrap(),
        }
    }
}

pub fn render_reports(result: &RunResult) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for row in &result.reports {
        out.push_str(&report_csv_row(row.topic.as_str(), &row.report, row.seed));
        out.push('\n');
    }
    out
}

pub fn render_embedding_scores(rows: &[ScoreRow]) -> String {
    let mut out = String::from(EMBEDDING_SCORES_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.2}",
            r.topic, r.task, r.score.embedding, r.score.top, r.score.mu
        )
        .unwrap();
    }
    out
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

pub fn render_best_models(result: &RunResult) -> String {
    let mut out = String::from("# Best models\n");
    for task in [Task::ThreeClass, Task::Binary] {
        let rows: Vec<_> = result.best_models.iter().filter(|b| b.task == task).collect();
        if rows.is_empty() {
            continue;
        }
        writeln!(out, "\n## {task}\n").unwrap();
        out.push_str("| topic | model | embedding | F1 | precision | recall | accuracy | AUC | dummy F1 |\n");
        out.push_str("|---|---|---|---|---|---|---|---|---|\n");
        for b in rows {
            let r = &b.best.report;
            let auc = r.auc_roc.map(fmt2).unwrap_or_else(|| "-".into());
            let dummy = b
                .baseline
                .as_ref()
                .map(|d| fmt2(d.report.f1()))
                .unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                b.topic,
                r.model,
                r.embedding,
                fmt2(r.metrics.f1),
                fmt2(r.metrics.precision),
                fmt2(r.metrics.recall),
                fmt2(r.metrics.accuracy),
                auc,
                dummy
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        "\nDummy baseline strategy: {}. It is excluded from the top-T scores and from best-model selection.",
        result.metadata.dummy_strategy
    )
    .unwrap();
    out
}

pub fn render_exclusions(result: &RunResult) -> String {
    let mut out = String::new();
    for e in &result.exclusions {
        writeln!(
            out,
            "excluded\t{}\t{}\t{}\t{}\t{}",
            e.topic,
            e.stage,
            e.embedding.as_deref().unwrap_or("-"),
            e.video_id,
            e.reason
        )
        .unwrap();
    }
    for s in &result.skipped {
        writeln!(
            out,
            "skipped\t{}\t-\t{}\t-\t{}",
            s.topic,
            s.embedding.as_deref().unwrap_or("-"),
            s.reason
        )
        .unwrap();
    }
    for f in &result.failures {
        writeln!(
            out,
            "failed\t{}\t{}\t{}\t{}\t{}",
            f.topic, f.task, f.embedding, f.model, f.reason
        )
        .unwrap();
    }
    out
}

fn render_splits(result: &RunResult) -> String {
    let mut out = String::from(SPLITS_HEADER);
    out.push('\n');
    for a in &result.audits {
        for (side, ids) in [("train", &a.resampled_ids), ("test", &a.evaluated_ids)] {
            for id in ids {
                writeln!(out, "{},{},{},{side},{id}", a.topic, a.task, a.embedding).unwrap();
            }
        }
    }
    out
}

fn render_meta(result: &RunResult) -> String {
    let m = &result.metadata;
    let mut out = String::new();
    writeln!(out, "config_fingerprint = {}", m.fingerprint).unwrap();
    writeln!(out, "master_seed = {}", m.master_seed).unwrap();
    writeln!(out, "rng = {}", m.rng_algorithm).unwrap();
    writeln!(out, "test_fraction = {}", m.test_fraction).unwrap();
    writeln!(out, "split = single stratified split, shared by both tasks").unwrap();
    writeln!(out, "smote.k = {}", m.smote_k).unwrap();
    writeln!(out, "dummy_strategy = {}", m.dummy_strategy).unwrap();
    writeln!(out, "reports = {}", result.reports.len()).unwrap();
    writeln!(out, "exclusions = {}", result.exclusions.len()).unwrap();
    writeln!(out, "skipped = {}", result.skipped.len()).unwrap();
    writeln!(out, "failures = {}", result.failures.len()).unwrap();
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), ReportError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| ReportError::Write { path, source })
}

/// Writes every report file into `dir`, creating it if needed.
pub fn emit_report(result: &RunResult, dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    write(dir, "reports.csv", &render_reports(result))?;
    write(
        dir,
        "embedding_scores.csv",
        &render_embedding_scores(&result.embedding_scores),
    )?;
    write(dir, "best_models.md", &render_best_models(result))?;
    write(dir, "exclusions.log", &render_exclusions(result))?;
    write(dir, "splits.csv", &render_splits(result))?;
    write(dir, "run_meta.txt", &render_meta(result))?;
    write(dir, "config.resolved", &result.resolved_config)
}

fn body<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>, ReportError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, h)) if h == header => Ok(lines.filter(|(_, l)| !l.is_empty())),
        _ => Err(ReportError::Parse {
            line: 1,
            message: format!("expected header `{header}`"),
        }),
    }
}

fn field<T: std::str::FromStr>(line: usize, name: &str, s: &str) -> Result<T, ReportError> {
    s.parse().map_err(|_| ReportError::Parse {
        line,
        message: format!("bad {name} `{s}`"),
    })
}

fn split_fields(line: usize, l: &str, n: usize) -> Result<Vec<&str>, ReportError> {
    let f: Vec<&str> = l.split(',').collect();
    if f.len() != n {
        return Err(ReportError::Parse {
            line,
            message: format!("expected {n} fields, found {}", f.len()),
        });
    }
    Ok(f)
}

pub fn parse_reports_csv(text: &str) -> Result<Vec<ReportRecord>, ReportError> {
    body(text, REPORT_CSV_HEADER)?
        .map(|(line, l)| {
            let f = split_fields(line, l, 10)?;
            Ok(ReportRecord {
                topic: field(line, "topic", f[0])?,
                task: field(line, "task", f[1])?,
                embedding: f[2].to_string(),
                model: f[3].to_string(),
                f1: field(line, "f1", f[4])?,
                precision: field(line, "precision", f[5])?,
                recall: field(line, "recall", f[6])?,
                accuracy: field(line, "accuracy", f[7])?,
                auc_roc: if f[8].is_empty() {
                    None
                } else {
                    Some(field(line, "auc", f[8])?)
                },
                seed: field(line, "seed", f[9])?,
            })
        })
        .collect()
}

pub fn parse_embedding_scores_csv(text: &str) -> Result<Vec<ScoreRecord>, ReportError> {
    body(text, EMBEDDING_SCORES_HEADER)?
        .map(|(line, l)| {
            let f = split_fields(line, l, 5)?;
            Ok(ScoreRecord {
                topic: field(line, "topic", f[0])?,
                task: field(line, "task", f[1])?,
                embedding: f[2].to_string(),
                top: field(line, "T", f[3])?,
                mu: field(line, "mu", f[4])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::EmbeddingScore;

    #[test]
    fn score_row_serialization() {
        let rows = vec![ScoreRow {
            topic: Topic::VaccinesControversy,
            task: Task::ThreeClass,
            score: EmbeddingScore {
                embedding: "glove100".into(),
                top: 5,
                mu: 0.8,
                models_used: 5,
            },
        }];
        let text = render_embedding_scores(&rows);
        assert_eq!(
            text,
            "topic,task,embedding,T,mu\nvaccines,three_class,glove100,5,0.80\n"
        );
        let back = parse_embedding_scores_csv(&text).unwrap();
        assert_eq!(back, vec![ScoreRecord::from(&rows[0])]);
    }

    #[test]
    fn parse_errors_are_located() {
        let text = format!("{REPORT_CSV_HEADER}\nvaccines,binary,g,knn,0.5,0.5,0.5,0.5,,1\nvaccines,binary,g\n");
        match parse_reports_csv(&text) {
            Err(ReportError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_reports_csv("nope\n").is_err());
    }
}
