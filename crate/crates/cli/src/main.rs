use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use capsift_core::corpus::{
    descriptive_stats, filter_corpus, load_caption, load_manifest, CaptionDocument, CaptionLoad, EngagementField,
    StopWords,
};
use capsift_core::embedding::{parse_embedding_file, vectorize_caption, ParseOptions};
use capsift_core::experiment::{emit_report, run_experiment, ExperimentConfig, TaskSelection};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "capsift", version, about = "Caption-based misinformation classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full per-topic experiment and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated topics, or `all`.
        #[arg(long)]
        topics: Option<String>,
        /// three, binary or both.
        #[arg(long)]
        task: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boxplot statistics of an engagement count per topic and class.
    Stats {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "views")]
        field: EngagementField,
    },
    /// Export averaged caption vectors as CSV.
    Vectorize {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        captions: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        lowercase_keys: bool,
    },
}

/// Outcome of a command that ran to completion.
enum Status {
    Complete,
    Partial,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            topics,
            task,
            seed,
            out,
        } => run(&config, topics, task, seed, out),
        Command::Stats { manifest, field } => stats(&manifest, field),
        Command::Vectorize {
            embedding,
            captions,
            manifest,
            out,
            lowercase_keys,
        } => vectorize(&embedding, &captions, &manifest, &out, lowercase_keys),
    };
    match result {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(
    config: &Path,
    topics: Option<String>,
    task: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<Status> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    let cwd = Path::new(".");
    if let Some(t) = topics {
        cfg.set("topics", &t, cwd).map_err(anyhow::Error::msg)?;
    }
    if let Some(t) = task {
        cfg.task = TaskSelection::parse(&t).map_err(anyhow::Error::msg)?;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = out {
        cfg.out_dir = o;
    }
    cfg.validate()?;

    let result = run_experiment(&cfg)?;
    emit_report(&result, &cfg.out_dir)?;
    eprintln!(
        "{} reports, {} exclusions, {} skipped, {} failed cells -> {}",
        result.reports.len(),
        result.exclusions.len(),
        result.skipped.len(),
        result.failures.len(),
        cfg.out_dir.display()
    );
    for s in &result.skipped {
        eprintln!("skipped {}: {}", s.topic, s.reason);
    }
    Ok(if result.is_partial() {
        Status::Partial
    } else {
        Status::Complete
    })
}

fn stats(manifest: &Path, field: EngagementField) -> Result<Status> {
    let records = load_manifest(manifest)?;
    let summaries = descriptive_stats(&records, field)?;
    println!("topic,label,field,n,min,q1,median,q3,max");
    for s in summaries {
        println!(
            "{},{},{},{},{},{},{},{},{}",
            s.topic,
            s.label.value(),
            s.field,
            s.n,
            s.min,
            s.q1,
            s.median,
            s.q3,
            s.max
        );
    }
    Ok(Status::Complete)
}

fn vectorize(embedding: &Path, captions: &Path, manifest: &Path, out: &Path, lowercase_keys: bool) -> Result<Status> {
    let table = parse_embedding_file(
        embedding,
        &ParseOptions {
            expected_dim: None,
            lowercase_keys,
        },
    )?;
    let records = load_manifest(manifest)?;
    let stopwords = StopWords::english();
    let mut docs = Vec::new();
    let mut dropped = 0;
    for rec in records {
        match load_caption(&rec, captions)? {
            CaptionLoad::Loaded { text, .. } => docs.push(CaptionDocument::new(rec, text, &stopwords)),
            CaptionLoad::Skipped { video_id, reason } => {
                eprintln!("skipped {video_id}: {reason}");
                dropped += 1;
            }
        }
    }
    let filtered = filter_corpus(docs);
    for r in &filtered.rejections {
        eprintln!("skipped {}: {}", r.video_id, r.reason);
        dropped += 1;
    }

    let mut csv = String::from("video_id,label,coverage");
    for i in 1..=table.dim() {
        write!(csv, ",v{i}")?;
    }
    csv.push('\n');
    let mut skipped_oov = 0;
    for doc in &filtered.retained {
        let cv = vectorize_caption(&table, &doc.tokens);
        let Some(v) = &cv.vector else {
            eprintln!("skipped {}: no in-vocabulary tokens", doc.record.video_id);
            dropped += 1;
            skipped_oov += 1;
            continue;
        };
        write!(
            csv,
            "{},{},{:?}",
            doc.record.video_id,
            doc.record.label.value(),
            cv.coverage()
        )?;
        for x in v {
            write!(csv, ",{x:?}")?;
        }
        csv.push('\n');
    }
    fs::write(out, csv).with_context(|| format!("cannot write {}", out.display()))?;
    eprintln!(
        "{} vectors written, {dropped} videos skipped",
        filtered.retained.len() - skipped_oov
    );
    Ok(Status::Complete)
}
