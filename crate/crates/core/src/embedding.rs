//! Pretrained word-embedding tables and caption vectorization.
//!
//! Two text formats are read:
//!
//! * GloVe: one `<word> <f1> ... <fD>` line per word, no header.
//! * word2vec text: a `<vocab_size> <D>` header line, then GloVe-style lines.
//!
//! The format is detected from the first line: exactly two unsigned integers
//! means word2vec, anything else GloVe.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {source}")]
    Read {
        line: usize,
        #[source]
        source: io::Error,
    },
    #[error("embedding file is empty")]
    Empty,
    #[error("line {line}: word `{word}` has no vector components")]
    MissingVector { line: usize, word: String },
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: `{token}` is not a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: non-finite component `{token}`")]
    NonFinite { line: usize, token: String },
    #[error("word2vec header declares {declared} words but the file has {found}")]
    HeaderCount { declared: usize, found: usize },
    #[error("word2vec header declares dimension 0")]
    ZeroDimension,
    #[error("table dimension {found} does not match expected {expected}")]
    ExpectedDimension { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    GloveText,
    Word2VecText,
}

/// Options for [`parse_embedding_file`].
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub expected_dim: Option<usize>,
    /// Lowercase keys on load; the first occurrence wins on collision.
    pub lowercase_keys: bool,
}

/// Immutable word → vector table.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    name: String,
    dim: usize,
    format: SourceFormat,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    /// Lines whose (possibly lowercased) key was already present.
    duplicates: usize,
}

impl EmbeddingTable {
    /// Builds a table from in-memory entries. Fails on dimension drift or
    /// non-finite components; later duplicates are dropped.
    pub fn from_entries<I>(name: &str, dim: usize, entries: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, Vec<f32>)>,
    {
        let mut builder = Builder::new(dim, SourceFormat::GloveText, false);
        for (i, (word, vector)) in entries.into_iter().enumerate() {
            if vector.len() != dim {
                return Err(EmbeddingError::DimensionMismatch {
                    line: i + 1,
                    expected: dim,
                    found: vector.len(),
                });
            }
            if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
                return Err(EmbeddingError::NonFinite {
                    line: i + 1,
                    token: bad.to_string(),
                });
            }
            builder.push(word, &vector);
        }
        Ok(builder.finish(name))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn format(&self) -> SourceFormat {
        self.format
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn duplicates_skipped(&self) -> usize {
        self.duplicates
    }

    /// Words in file order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Exact-match lookup. A miss is `None`.
    pub fn lookup(&self, token: &str) -> Option<&[f32]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Writes the table in GloVe text format.
    pub fn write_glove<W: Write>(&self, mut out: W) -> io::Result<()> {
        for word in &self.words {
            write_entry(&mut out, word, self.lookup(word).unwrap())?;
        }
        out.flush()
    }

    /// Writes the table in word2vec text format.
    pub fn write_word2vec<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{} {}", self.words.len(), self.dim)?;
        self.write_glove(out)
    }
}

fn write_entry<W: Write>(out: &mut W, word: &str, vector: &[f32]) -> io::Result<()> {
    out.write_all(word.as_bytes())?;
    for v in vector {
        // Display prints the shortest representation that parses back exactly.
        write!(out, " {v}")?;
    }
    out.write_all(b"\n")
}

struct Builder {
    dim: usize,
    format: SourceFormat,
    lowercase: bool,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    duplicates: usize,
}

impl Builder {
    fn new(dim: usize, format: SourceFormat, lowercase: bool) -> Self {
        Builder {
            dim,
            format,
            lowercase,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            duplicates: 0,
        }
    }

    fn push(&mut self, word: String, vector: &[f32]) {
        let key = if self.lowercase { word.to_lowercase() } else { word };
        if self.index.contains_key(&key) {
            self.duplicates += 1;
            return;
        }
        self.index.insert(key.clone(), self.words.len());
        self.words.push(key);
        self.data.extend_from_slice(vector);
    }

    fn finish(self, name: &str) -> EmbeddingTable {
        EmbeddingTable {
            name: name.to_string(),
            dim: self.dim,
            format: self.format,
            words: self.words,
            index: self.index,
            data: self.data,
            duplicates: self.duplicates,
        }
    }
}

/// Parses an embedding file. The table name defaults to the file stem.
pub fn parse_embedding_file(path: &Path, opts: &ParseOptions) -> Result<EmbeddingTable, EmbeddingError> {
    let file = fs::File::open(path).map_err(|source| EmbeddingError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_embedding(BufReader::new(file), &name, opts)
}

/// Parses embedding text from a reader.
pub fn parse_embedding<R: Read>(reader: R, name: &str, opts: &ParseOptions) -> Result<EmbeddingTable, EmbeddingError> {
    let mut lines = BufReader::new(reader).lines().enumerate();

    let (first_no, first) = loop {
        match lines.next() {
            None => return Err(EmbeddingError::Empty),
            Some((i, line)) => {
                let line = line.map_err(|source| EmbeddingError::Read { line: i + 1, source })?;
                if !line.trim().is_empty() {
                    break (i + 1, line);
                }
            }
        }
    };

    let header = parse_header(&first);
    let (format, mut dim, declared, pending) = match header {
        Some((count, d)) => {
            if d == 0 {
                return Err(EmbeddingError::ZeroDimension);
            }
            (SourceFormat::Word2VecText, Some(d), Some(count), None)
        }
        None => (SourceFormat::GloveText, None, None, Some((first_no, first))),
    };

    let mut builder: Option<Builder> = dim.map(|d| Builder::new(d, format, opts.lowercase_keys));
    let mut parsed_lines = 0usize;
    let mut components: Vec<f32> = Vec::new();

    let mut handle = |line_no: usize, line: &str, dim: &mut Option<usize>| -> Result<(), EmbeddingError> {
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else {
            return Ok(());
        };
        components.clear();
        for token in fields {
            let v: f32 = token.parse().map_err(|_| EmbeddingError::BadNumber {
                line: line_no,
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(EmbeddingError::NonFinite {
                    line: line_no,
                    token: token.to_string(),
                });
            }
            components.push(v);
        }
        if components.is_empty() {
            return Err(EmbeddingError::MissingVector {
                line: line_no,
                word: word.to_string(),
            });
        }
        let expected = *dim.get_or_insert(components.len());
        if components.len() != expected {
            return Err(EmbeddingError::DimensionMismatch {
                line: line_no,
                expected,
                found: components.len(),
            });
        }
        builder
            .get_or_insert_with(|| Builder::new(expected, format, opts.lowercase_keys))
            .push(word.to_string(), &components);
        parsed_lines += 1;
        Ok(())
    };

    if let Some((no, line)) = pending {
        handle(no, &line, &mut dim)?;
    }
    for (i, line) in lines {
        let line = line.map_err(|source| EmbeddingError::Read { line: i + 1, source })?;
        handle(i + 1, &line, &mut dim)?;
    }

    if let Some(declared) = declared {
        if declared != parsed_lines {
            return Err(EmbeddingError::HeaderCount {
                declared,
                found: parsed_lines,
            });
        }
    }
    let Some(builder) = builder else {
        return Err(EmbeddingError::Empty);
    };
    if let Some(expected) = opts.expected_dim {
        if expected != builder.dim {
            return Err(EmbeddingError::ExpectedDimension {
                expected,
                found: builder.dim,
            });
        }
    }
    Ok(builder.finish(name))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let count = it.next()?.parse().ok()?;
    let dim = it.next()?.parse().ok()?;
    match it.next() {
        None => Some((count, dim)),
        Some(_) => None,
    }
}

/// Mean embedding of a caption's in-vocabulary tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionVector {
    /// `None` when no token was found in the table.
    pub vector: Option<Vec<f64>>,
    pub tokens_total: usize,
    pub tokens_in_vocab: usize,
}

impl CaptionVector {
    pub fn coverage(&self) -> f64 {
        if self.tokens_total == 0 {
            0.0
        } else {
            self.tokens_in_vocab as f64 / self.tokens_total as f64
        }
    }
}

/// Averages the vectors of every in-vocabulary token occurrence. Repeated
/// tokens count once per occurrence; out-of-vocabulary tokens are skipped.
pub fn vectorize_caption<S: AsRef<str>>(table: &EmbeddingTable, tokens: &[S]) -> CaptionVector {
    let mut sum = vec![0.0f64; table.dim()];
    let mut hits = 0usize;
    for token in tokens {
        if let Some(v) = table.lookup(token.as_ref()) {
            hits += 1;
            for (acc, &x) in sum.iter_mut().zip(v) {
                *acc += f64::from(x);
            }
        }
    }
    let vector = (hits > 0).then(|| {
        let n = hits as f64;
        sum.into_iter().map(|s| s / n).collect()
    });
    CaptionVector {
        vector,
        tokens_total: tokens.len(),
        tokens_in_vocab: hits,
    }
}
