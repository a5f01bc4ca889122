//! Manifest and caption ingestion, text cleaning and corpus filtering.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::Label;

/// Captions shorter than this many characters (raw text) are discarded.
pub const MIN_CAPTION_CHARS: usize = 500;

/// Documents whose stopword hit-ratio falls below this are treated as non-English.
pub const MIN_STOPWORD_RATIO: f64 = 0.05;

/// Expected manifest header, in order.
pub const MANIFEST_COLUMNS: [&str; 8] = [
    "video_id",
    "topic",
    "label",
    "caption_path",
    "views",
    "likes",
    "dislikes",
    "comments",
];

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("manifest has no header row")]
    MissingHeader,
    #[error("manifest header mismatch: expected `{expected}`, found `{found}`")]
    BadHeader { expected: String, found: String },
    #[error("manifest line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("manifest line {line}: duplicate video_id `{id}`")]
    DuplicateId { line: u64, id: String },
    #[error("caption file {path} is not valid UTF-8")]
    InvalidUtf8 { path: PathBuf },
    #[error("field `{0}` is absent from every record")]
    FieldAbsent(EngagementField),
}

/// Conspiracy topic a video belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Topic {
    VaccinesControversy,
    NineElevenConspiracy,
    ChemtrailConspiracy,
    MoonLanding,
    FlatEarth,
}

impl Topic {
    pub const ALL: [Topic; 5] = [
        Topic::VaccinesControversy,
        Topic::NineElevenConspiracy,
        Topic::ChemtrailConspiracy,
        Topic::MoonLanding,
        Topic::FlatEarth,
    ];

    /// Manifest token for the topic.
    pub fn as_str(&self) -> &'static str {
        match self {
            Topic::VaccinesControversy => "vaccines",
            Topic::NineElevenConspiracy => "911",
            Topic::ChemtrailConspiracy => "chemtrail",
            Topic::MoonLanding => "moon",
            Topic::FlatEarth => "flatearth",
        }
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topic::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown topic `{s}`"))
    }
}

/// Three-way video class. Variant order follows the numeric label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Debunking,
    Neutral,
    Misinformation,
}

impl ClassLabel {
    pub fn value(&self) -> Label {
        match self {
            ClassLabel::Debunking => -1,
            ClassLabel::Neutral => 0,
            ClassLabel::Misinformation => 1,
        }
    }
}

impl TryFrom<Label> for ClassLabel {
    type Error = String;

    fn try_from(v: Label) -> Result<Self, Self::Error> {
        match v {
            -1 => Ok(ClassLabel::Debunking),
            0 => Ok(ClassLabel::Neutral),
            1 => Ok(ClassLabel::Misinformation),
            other => Err(format!("label {other} is not one of -1, 0, 1")),
        }
    }
}

/// Engagement count columns of the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EngagementField {
    Views,
    Likes,
    Dislikes,
    Comments,
}

impl EngagementField {
    pub fn as_str(&self) -> &'static str {
        match self {
            EngagementField::Views => "views",
            EngagementField::Likes => "likes",
            EngagementField::Dislikes => "dislikes",
            EngagementField::Comments => "comments",
        }
    }
}

impl fmt::Display for EngagementField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EngagementField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "views" => Ok(EngagementField::Views),
            "likes" => Ok(EngagementField::Likes),
            "dislikes" => Ok(EngagementField::Dislikes),
            "comments" => Ok(EngagementField::Comments),
            _ => Err(format!("unknown field `{s}` (views, likes, dislikes, comments)")),
        }
    }
}

/// One labelled video from the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoRecord {
    pub video_id: String,
    pub topic: Topic,
    pub label: ClassLabel,
    pub caption_path: PathBuf,
    pub views: Option<u64>,
    pub likes: Option<u64>,
    pub dislikes: Option<u64>,
    pub comments: Option<u64>,
}

impl VideoRecord {
    pub fn count(&self, field: EngagementField) -> Option<u64> {
        match field {
            EngagementField::Views => self.views,
            EngagementField::Likes => self.likes,
            EngagementField::Dislikes => self.dislikes,
            EngagementField::Comments => self.comments,
        }
    }
}

/// Reads a manifest CSV file.
pub fn load_manifest(path: &Path) -> Result<Vec<VideoRecord>, CorpusError> {
    let file = fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_manifest(file)
}

/// Reads manifest rows from any reader. Line numbers in errors are 1-based and
/// count the header as line 1.
pub fn read_manifest<R: Read>(reader: R) -> Result<Vec<VideoRecord>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(CorpusError::MissingHeader);
    }
    if headers.iter().ne(MANIFEST_COLUMNS.iter().copied()) {
        return Err(CorpusError::BadHeader {
            expected: MANIFEST_COLUMNS.join(","),
            found: headers.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, row) in rdr.records().enumerate() {
        // header is line 1, first data row line 2
        let fallback_line = idx as u64 + 2;
        let row = row.map_err(|e| csv_error(e, fallback_line))?;
        let line = row.position().map_or(fallback_line, |p| p.line());
        let record = parse_row(&row, line)?;
        if !seen.insert(record.video_id.clone()) {
            return Err(CorpusError::DuplicateId {
                line,
                id: record.video_id,
            });
        }
        records.push(record);
    }
    Ok(records)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> CorpusError {
    let line = err.position().map_or(fallback_line, |p| p.line());
    CorpusError::Malformed {
        line,
        message: err.to_string(),
    }
}

fn parse_row(row: &csv::StringRecord, line: u64) -> Result<VideoRecord, CorpusError> {
    let malformed = |message: String| CorpusError::Malformed { line, message };

    let video_id = row[0].to_string();
    if video_id.is_empty() {
        return Err(malformed("empty video_id".into()));
    }
    let topic = row[1].parse::<Topic>().map_err(malformed)?;
    let label_value = row[2]
        .parse::<Label>()
        .map_err(|_| malformed(format!("label `{}` is not an integer", &row[2])))?;
    let label = ClassLabel::try_from(label_value).map_err(malformed)?;
    let caption_path = PathBuf::from(&row[3]);
    if row[3].is_empty() {
        return Err(malformed("empty caption_path".into()));
    }

    let count = |col: usize| -> Result<Option<u64>, CorpusError> {
        let cell = &row[col];
        if cell.is_empty() {
            return Ok(None);
        }
        cell.parse::<u64>().map(Some).map_err(|_| {
            malformed(format!(
                "{} `{cell}` is not a nonnegative integer",
                MANIFEST_COLUMNS[col]
            ))
        })
    };

    Ok(VideoRecord {
        video_id,
        topic,
        label,
        caption_path,
        views: count(4)?,
        likes: count(5)?,
        dislikes: count(6)?,
        comments: count(7)?,
    })
}

/// Outcome of reading a caption file. A missing file is not fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaptionLoad {
    Loaded { text: String, raw_char_count: usize },
    Skipped { video_id: String, reason: String },
}

/// Reads the caption file of `record`, resolving its path against `captions_root`.
pub fn load_caption(record: &VideoRecord, captions_root: &Path) -> Result<CaptionLoad, CorpusError> {
    let path = captions_root.join(&record.caption_path);
    let bytes = match fs::read(&path) {
        Ok(bytes) => bytes,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Ok(CaptionLoad::Skipped {
                video_id: record.video_id.clone(),
                reason: format!("caption file {} not found", path.display()),
            })
        }
        Err(source) => return Err(CorpusError::Io { path, source }),
    };
    let text = String::from_utf8(bytes).map_err(|_| CorpusError::InvalidUtf8 { path })?;
    let raw_char_count = text.chars().count();
    Ok(CaptionLoad::Loaded { text, raw_char_count })
}

/// Lowercase stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    /// The bundled English list.
    pub fn english() -> Self {
        Self::from_lines(DEFAULT_STOPWORDS)
    }

    /// One word per line; blank lines ignored, words lowercased.
    pub fn from_lines(text: &str) -> Self {
        text.lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect()
    }

    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::from_lines(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopWords(iter.into_iter().map(Into::into).collect())
    }
}

/// Result of cleaning one caption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preprocessed {
    /// Alphabetic characters and single spaces only, original case.
    pub cleaned_text: String,
    /// Lowercase tokens with stopwords removed, in original order.
    pub tokens: Vec<String>,
    /// Number of tokens before stopword removal.
    pub total_tokens: usize,
    pub stopword_hits: usize,
}

/// Replaces every non-alphabetic character by a space, collapses whitespace,
/// lowercases and drops stopwords.
pub fn preprocess_caption(raw: &str, stopwords: &StopWords) -> Preprocessed {
    let replaced: String = raw.chars().map(|c| if c.is_alphabetic() { c } else { ' ' }).collect();
    let cleaned_text = replaced.split_whitespace().collect::<Vec<_>>().join(" ");

    let mut tokens = Vec::new();
    let mut total_tokens = 0;
    let mut stopword_hits = 0;
    for word in cleaned_text.split(' ').filter(|w| !w.is_empty()) {
        total_tokens += 1;
        let lower = word.to_lowercase();
        if stopwords.contains(&lower) {
            stopword_hits += 1;
        } else {
            tokens.push(lower);
        }
    }

    Preprocessed {
        cleaned_text,
        tokens,
        total_tokens,
        stopword_hits,
    }
}

/// A caption after cleaning, tied to its manifest record.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionDocument {
    pub record: VideoRecord,
    pub raw_text: String,
    pub cleaned_text: String,
    pub tokens: Vec<String>,
    pub raw_char_count: usize,
    pub total_tokens: usize,
    pub stopword_hits: usize,
}

impl CaptionDocument {
    pub fn new(record: VideoRecord, raw_text: String, stopwords: &StopWords) -> Self {
        let pre = preprocess_caption(&raw_text, stopwords);
        CaptionDocument {
            record,
            raw_char_count: raw_text.chars().count(),
            raw_text,
            cleaned_text: pre.cleaned_text,
            tokens: pre.tokens,
            total_tokens: pre.total_tokens,
            stopword_hits: pre.stopword_hits,
        }
    }

    /// Stopword tokens over all tokens before removal; 0 for an empty caption.
    pub fn stopword_ratio(&self) -> f64 {
        if self.total_tokens == 0 {
            0.0
        } else {
            self.stopword_hits as f64 / self.total_tokens as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RejectionReason {
    TooShort { chars: usize, minimum: usize },
    NotEnglish { ratio: f64, threshold: f64 },
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectionReason::TooShort { chars, minimum } => {
                write!(f, "caption has {chars} characters (minimum {minimum})")
            }
            RejectionReason::NotEnglish { ratio, threshold } => {
                write!(f, "stopword ratio {ratio:.4} below English threshold {threshold}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub video_id: String,
    pub reason: RejectionReason,
}

#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    pub retained: Vec<CaptionDocument>,
    pub rejections: Vec<Rejection>,
}

/// Drops short captions and captions that fail the English heuristic.
/// Retained documents keep their input order.
pub fn filter_corpus(documents: Vec<CaptionDocument>) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    for doc in documents {
        let reason = if doc.raw_char_count < MIN_CAPTION_CHARS {
            Some(RejectionReason::TooShort {
                chars: doc.raw_char_count,
                minimum: MIN_CAPTION_CHARS,
            })
        } else if doc.stopword_ratio() < MIN_STOPWORD_RATIO {
            Some(RejectionReason::NotEnglish {
                ratio: doc.stopword_ratio(),
                threshold: MIN_STOPWORD_RATIO,
            })
        } else {
            None
        };
        match reason {
            Some(reason) => out.rejections.push(Rejection {
                video_id: doc.record.video_id.clone(),
                reason,
            }),
            None => out.retained.push(doc),
        }
    }
    out
}

/// Five-number summary of one engagement field within a (topic, label) group.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotSummary {
    pub topic: Topic,
    pub label: ClassLabel,
    pub field: EngagementField,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub n: usize,
}

/// Quantile of ascending-sorted data by linear interpolation between order
/// statistics (position `(n - 1) * p`).
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let pos = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Per (topic, label) five-number summaries of `field`. Groups without data
/// are omitted; output is ordered by topic then label.
pub fn descriptive_stats(records: &[VideoRecord], field: EngagementField) -> Result<Vec<BoxplotSummary>, CorpusError> {
    let mut groups: BTreeMap<(Topic, ClassLabel), Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(v) = r.count(field) {
            groups.entry((r.topic, r.label)).or_default().push(v as f64);
        }
    }
    if groups.is_empty() {
        return Err(CorpusError::FieldAbsent(field));
    }

    Ok(groups
        .into_iter()
        .map(|((topic, label), mut values)| {
            values.sort_by(f64::total_cmp);
            BoxplotSummary {
                topic,
                label,
                field,
                min: values[0],
                q1: quantile_linear(&values, 0.25),
                median: quantile_linear(&values, 0.5),
                q3: quantile_linear(&values, 0.75),
                max: values[values.len() - 1],
                n: values.len(),
            }
        })
        .collect())
}
