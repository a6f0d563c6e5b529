//! Synthetic corpora with planted topic epochs.
//!
//! Every document follows the LDA generative process: each token draws a
//! topic from its epoch's mixture, then a word from that topic's row of the
//! topic-word matrix. Transitions between epochs are abrupt unless a blend
//! width is given, in which case the first `blend_width` years of an epoch
//! interpolate linearly from the previous epoch's mixture.

mod spec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Document};
use crate::rng;
use crate::topics::check_simplex;

pub use spec::{SynthSpec, TopicsSpec};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("no epochs given")]
    NoEpochs,
    #[error("epoch {index}: {message}")]
    InvalidEpoch { index: usize, message: String },
    #[error("epoch {index} starts at {start} but the previous epoch ends at {prev_end}")]
    NotContiguous {
        index: usize,
        start: i32,
        prev_end: i32,
    },
    #[error("topic-word row {row}: {message}")]
    InvalidTopicWord { row: usize, message: String },
    #[error("epoch {index} mixture has {actual} topics, topic-word matrix has {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("{0}")]
    Spec(String),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochSpec {
    pub start: i32,
    pub end: i32,
    pub mixture: Vec<f64>,
    pub docs_per_year: usize,
    pub doc_length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    /// Start year of every epoch but the first.
    pub boundaries: Vec<i32>,
    pub seed: u64,
    pub blend_width: u32,
    pub epochs: Vec<EpochSpec>,
}

/// Alphabetic token for vocabulary index `i`: `w` followed by at least
/// three base-26 letters (`waaa`, `waab`, ...).
pub fn term_name(i: usize) -> String {
    let mut letters = Vec::new();
    let mut n = i;
    loop {
        letters.push(b'a' + (n % 26) as u8);
        n /= 26;
        if n == 0 && letters.len() >= 3 {
            break;
        }
    }
    letters.push(b'w');
    letters.reverse();
    String::from_utf8(letters).expect("ascii")
}

/// Topic-word rows over disjoint blocks of `words_per_topic` terms, plus an
/// optional block of `shared_words` terms that every topic puts
/// `shared_weight` of its mass on.
pub fn disjoint_topics(
    k: usize,
    words_per_topic: usize,
    shared_words: usize,
    shared_weight: f64,
) -> Vec<Vec<f64>> {
    let v = k * words_per_topic + shared_words;
    let own = if shared_words == 0 {
        1.0
    } else {
        1.0 - shared_weight
    };
    (0..k)
        .map(|t| {
            let mut row = vec![0.0; v];
            for w in 0..words_per_topic {
                row[t * words_per_topic + w] = own / words_per_topic as f64;
            }
            for w in 0..shared_words {
                row[k * words_per_topic + w] = shared_weight / shared_words as f64;
            }
            row
        })
        .collect()
}

fn validate(epochs: &[EpochSpec], topic_word: &[Vec<f64>]) -> Result<(), SynthError> {
    if epochs.is_empty() {
        return Err(SynthError::NoEpochs);
    }
    for (row, p) in topic_word.iter().enumerate() {
        check_simplex(p).map_err(|message| SynthError::InvalidTopicWord { row, message })?;
    }
    let v = topic_word.first().map_or(0, Vec::len);
    if let Some(row) = topic_word.iter().position(|r| r.len() != v) {
        return Err(SynthError::InvalidTopicWord {
            row,
            message: "rows differ in length".into(),
        });
    }
    for (index, e) in epochs.iter().enumerate() {
        let invalid = |message: &str| SynthError::InvalidEpoch {
            index,
            message: message.into(),
        };
        if e.start > e.end {
            return Err(invalid("start after end"));
        }
        if e.docs_per_year == 0 || e.doc_length == 0 {
            return Err(invalid("docs_per_year and doc_length must be at least 1"));
        }
        if e.mixture.len() != topic_word.len() {
            return Err(SynthError::DimensionMismatch {
                index,
                expected: topic_word.len(),
                actual: e.mixture.len(),
            });
        }
        check_simplex(&e.mixture).map_err(|m| invalid(&m))?;
        if index > 0 && e.start != epochs[index - 1].end + 1 {
            return Err(SynthError::NotContiguous {
                index,
                start: e.start,
                prev_end: epochs[index - 1].end,
            });
        }
    }
    Ok(())
}

/// Abrupt epochs; see [`generate_blended`].
pub fn generate(
    epochs: &[EpochSpec],
    topic_word: &[Vec<f64>],
    seed: u64,
) -> Result<(Corpus, SyntheticTruth), SynthError> {
    generate_blended(epochs, topic_word, seed, 0)
}

/// Generates `docs_per_year` documents for every year of every epoch.
/// Epochs must be contiguous and in order.
pub fn generate_blended(
    epochs: &[EpochSpec],
    topic_word: &[Vec<f64>],
    seed: u64,
    blend_width: u32,
) -> Result<(Corpus, SyntheticTruth), SynthError> {
    validate(epochs, topic_word)?;
    let names: Vec<String> = (0..topic_word[0].len()).map(term_name).collect();
    let mut r = rng::seeded(seed);
    let mut documents = Vec::new();
    for (index, epoch) in epochs.iter().enumerate() {
        for year in epoch.start..=epoch.end {
            let offset = (year - epoch.start) as u32;
            let mixture: Vec<f64> = if index > 0 && offset < blend_width {
                let w = f64::from(offset + 1) / f64::from(blend_width + 1);
                epochs[index - 1]
                    .mixture
                    .iter()
                    .zip(&epoch.mixture)
                    .map(|(p, c)| (1.0 - w) * p + w * c)
                    .collect()
            } else {
                epoch.mixture.clone()
            };
            for d in 0..epoch.docs_per_year {
                let words: Vec<&str> = (0..epoch.doc_length)
                    .map(|_| {
                        let topic = rng::weighted(&mut r, &mixture, 1.0);
                        names[rng::weighted(&mut r, &topic_word[topic], 1.0)].as_str()
                    })
                    .collect();
                documents.push(Document::new(
                    format!("{year}-{d:04}"),
                    year,
                    words.join(" "),
                ));
            }
        }
    }
    let truth = SyntheticTruth {
        boundaries: epochs.iter().skip(1).map(|e| e.start).collect(),
        seed,
        blend_width,
        epochs: epochs.to_vec(),
    };
    Ok((Corpus::new(documents)?, truth))
}
