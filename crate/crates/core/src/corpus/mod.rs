//! Timestamped documents, JSON-Lines ingestion, tokenization and
//! bag-of-words vectors.

mod tokenize;
mod vocab;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tokenize::{load_stopwords, tokenize, TokenizerSettings, DEFAULT_MIN_TOKEN_LEN};
pub use vocab::{build_vocabulary, vectorize, BowVector, Vocabulary};

/// Inclusive sanity bound on document years.
pub const MIN_YEAR: i32 = 1000;
pub const MAX_YEAR: i32 = 3000;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("duplicate document id \"{id}\" at lines {first} and {second}")]
    DuplicateId {
        id: String,
        first: usize,
        second: usize,
    },
    #[error("line {line}: document id must be non-empty")]
    EmptyId { line: usize },
    #[error("line {line}: year {year} of document \"{id}\" is outside [{MIN_YEAR}, {MAX_YEAR}]")]
    YearOutOfRange { line: usize, id: String, year: i64 },
    #[error("empty corpus")]
    Empty,
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("min_df must be at least 1")]
    InvalidMinDf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub year: i32,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, year: i32, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            year,
            text: text.into(),
        }
    }
}

/// A validated, non-empty document collection with its year span.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    year_begin: i32,
    year_end: i32,
    present_years: BTreeSet<i32>,
}

impl Corpus {
    /// Validates ids and years. Positions in errors are 1-based document
    /// indices.
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let positions: Vec<usize> = (1..=documents.len()).collect();
        Self::with_positions(documents, &positions)
    }

    fn with_positions(documents: Vec<Document>, positions: &[usize]) -> Result<Self, CorpusError> {
        if documents.is_empty() {
            return Err(CorpusError::Empty);
        }
        let mut seen: HashMap<&str, usize> = HashMap::with_capacity(documents.len());
        for (doc, &line) in documents.iter().zip(positions) {
            if doc.id.is_empty() {
                return Err(CorpusError::EmptyId { line });
            }
            if !(MIN_YEAR..=MAX_YEAR).contains(&doc.year) {
                return Err(CorpusError::YearOutOfRange {
                    line,
                    id: doc.id.clone(),
                    year: doc.year.into(),
                });
            }
            if let Some(&first) = seen.get(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    id: doc.id.clone(),
                    first,
                    second: line,
                });
            }
            seen.insert(&doc.id, line);
        }
        let present_years: BTreeSet<i32> = documents.iter().map(|d| d.year).collect();
        Ok(Self {
            year_begin: *present_years.first().expect("non-empty"),
            year_end: *present_years.last().expect("non-empty"),
            present_years,
            documents,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// First year with at least one document (Y_b).
    pub fn year_begin(&self) -> i32 {
        self.year_begin
    }

    /// Last year with at least one document (Y_e).
    pub fn year_end(&self) -> i32 {
        self.year_end
    }

    pub fn present_years(&self) -> &BTreeSet<i32> {
        &self.present_years
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.documents.iter().map(|d| d.year)
    }

    /// Number of documents per present year.
    pub fn year_counts(&self) -> BTreeMap<i32, usize> {
        let mut counts = BTreeMap::new();
        for y in self.years() {
            *counts.entry(y).or_insert(0) += 1;
        }
        counts
    }

    /// Sub-corpus of the documents at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Corpus, CorpusError> {
        Corpus::new(indices.iter().map(|&i| self.documents[i].clone()).collect())
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }
}

#[derive(Deserialize)]
struct Record {
    id: String,
    year: i64,
    text: String,
}

/// Reads a JSON-Lines corpus. Blank lines are skipped; unknown fields are
/// ignored. Line numbers in errors are 1-based physical lines.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut documents = Vec::new();
    let mut lines = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        let year = i32::try_from(rec.year)
            .ok()
            .filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y))
            .ok_or_else(|| CorpusError::YearOutOfRange {
                line: lineno,
                id: rec.id.clone(),
                year: rec.year,
            })?;
        documents.push(Document::new(rec.id, year, rec.text));
        lines.push(lineno);
    }
    Corpus::with_positions(documents, &lines)
}

pub fn ingest_jsonl(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_jsonl(BufReader::new(file))
}

pub fn write_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> std::io::Result<()> {
    for doc in corpus.documents() {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
