//! LDA topic model trained by collapsed Gibbs sampling, fold-in inference
//! for unseen documents, top words and per-year topic trends.

mod gibbs;
mod io;
mod trends;

use thiserror::Error;

use crate::corpus::Vocabulary;
use crate::textfmt::ParseError;

pub use gibbs::{infer_theta, joint_log_likelihood, train_lda, Inference, LdaFit};
pub(crate) use io::read_lda_section;
pub use io::{parse_lda_section, write_lda_section, LDA_HEADER};
pub use trends::{topic_trends, write_trends_csv, TrendSeries};

/// Tolerance for simplex sums.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TopicError {
    #[error("topic count must be at least 2, got {0}")]
    TooFewTopics(usize),
    #[error("{name} must be positive and finite, got {value}")]
    InvalidHyperparameter { name: &'static str, value: f64 },
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("vocabulary size must be at least 1")]
    EmptyVocabulary,
    #[error("no tokens to train on: every document is empty")]
    NoTokens,
    #[error("term id {term} outside vocabulary of size {vocab_size}")]
    TermOutOfRange { term: usize, vocab_size: usize },
    #[error("topic {topic} out of range for a {k}-topic model")]
    TopicOutOfRange { topic: usize, k: usize },
    #[error("expected {expected} topic distributions, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("not a probability distribution: {0}")]
    NotOnSimplex(String),
    #[error("model file {0}")]
    Parse(#[from] ParseError),
}

/// Training settings. `alpha` defaults to 50/K.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaParams {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl LdaParams {
    pub const DEFAULT_BETA: f64 = 0.01;
    pub const DEFAULT_ITERATIONS: usize = 1000;

    pub fn default_alpha(k: usize) -> f64 {
        50.0 / k as f64
    }

    pub fn new(k: usize) -> Self {
        Self {
            k,
            alpha: Self::default_alpha(k),
            beta: Self::DEFAULT_BETA,
            iterations: Self::DEFAULT_ITERATIONS,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<(), TopicError> {
        if self.k < 2 {
            return Err(TopicError::TooFewTopics(self.k));
        }
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(TopicError::InvalidHyperparameter { name, value });
            }
        }
        if self.iterations == 0 {
            return Err(TopicError::NoIterations);
        }
        Ok(())
    }
}

/// Per-document topic proportions.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicDistribution(Vec<f64>);

impl TopicDistribution {
    pub fn new(theta: Vec<f64>) -> Result<Self, TopicError> {
        check_simplex(&theta).map_err(TopicError::NotOnSimplex)?;
        Ok(Self(theta))
    }

    pub fn uniform(k: usize) -> Self {
        Self(vec![1.0 / k as f64; k])
    }

    /// `(n_k + alpha) / (n + K alpha)`.
    pub(crate) fn from_counts(counts: &[u32], alpha: f64) -> Self {
        let n: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        let denom = n as f64 + counts.len() as f64 * alpha;
        Self(
            counts
                .iter()
                .map(|&c| (f64::from(c) + alpha) / denom)
                .collect(),
        )
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest entry; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}

/// Checks entries are non-negative and sum to 1 within [`SIMPLEX_TOL`].
pub fn check_simplex(p: &[f64]) -> Result<(), String> {
    if p.is_empty() {
        return Err("empty vector".into());
    }
    if let Some(x) = p.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(format!("entry {x} is negative or not finite"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(format!("entries sum to {sum}"));
    }
    Ok(())
}

/// Trained topic-word distributions and the settings that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    k: usize,
    vocab_size: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    seed: u64,
    /// Row-major K x V.
    phi: Vec<f64>,
}

impl TopicModel {
    /// Builds a model from explicit topic-word rows. Every row must lie on
    /// the simplex.
    pub fn from_phi(phi_rows: Vec<Vec<f64>>, alpha: f64, beta: f64) -> Result<Self, TopicError> {
        let k = phi_rows.len();
        let vocab_size = phi_rows.first().map_or(0, Vec::len);
        let params = LdaParams {
            k,
            alpha,
            beta,
            iterations: 1,
            seed: 0,
        };
        params.validate()?;
        if vocab_size == 0 {
            return Err(TopicError::EmptyVocabulary);
        }
        for row in &phi_rows {
            if row.len() != vocab_size {
                return Err(TopicError::NotOnSimplex("ragged topic-word rows".into()));
            }
            check_simplex(row).map_err(TopicError::NotOnSimplex)?;
        }
        Ok(Self {
            k,
            vocab_size,
            alpha,
            beta,
            iterations: 0,
            seed: 0,
            phi: phi_rows.concat(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn phi_row(&self, topic: usize) -> &[f64] {
        &self.phi[topic * self.vocab_size..(topic + 1) * self.vocab_size]
    }

    pub fn phi(&self, topic: usize, term: usize) -> f64 {
        self.phi[topic * self.vocab_size + term]
    }

    pub fn phi_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.phi.chunks(self.vocab_size)
    }
}

/// The `n` most probable terms of `topic`, ties broken lexicographically.
pub fn top_words(
    model: &TopicModel,
    vocab: &Vocabulary,
    topic: usize,
    n: usize,
) -> Result<Vec<(String, f64)>, TopicError> {
    if topic >= model.k() {
        return Err(TopicError::TopicOutOfRange {
            topic,
            k: model.k(),
        });
    }
    let row = model.phi_row(topic);
    let mut ids: Vec<usize> = (0..row.len()).collect();
    ids.sort_by(|&a, &b| {
        row[b]
            .total_cmp(&row[a])
            .then_with(|| vocab.term(a).cmp(&vocab.term(b)))
    });
    Ok(ids
        .into_iter()
        .take(n)
        .map(|id| (vocab.term(id).unwrap_or_default().to_owned(), row[id]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(terms: &[&str]) -> Vocabulary {
        Vocabulary::from_parts(
            terms.iter().map(|t| t.to_string()).collect(),
            vec![1; terms.len()],
            1,
        )
        .unwrap()
    }

    #[test]
    fn top_words_sorted_and_clamped() {
        let m =
            TopicModel::from_phi(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.2, 0.7]], 1.0, 0.1).unwrap();
        let v = vocab(&["a", "b", "c"]);
        let top = top_words(&m, &v, 0, 2).unwrap();
        assert_eq!(top, [("a".to_string(), 0.7), ("b".to_string(), 0.2)]);
        assert_eq!(top_words(&m, &v, 1, 10).unwrap().len(), 3);
        assert!(matches!(
            top_words(&m, &v, 2, 1),
            Err(TopicError::TopicOutOfRange { topic: 2, k: 2 })
        ));
    }

    #[test]
    fn top_words_ties_are_lexicographic() {
        let m = TopicModel::from_phi(vec![vec![0.25; 4], vec![0.25; 4]], 1.0, 0.1).unwrap();
        let v = vocab(&["apple", "kiwi", "mango", "pear"]);
        let names: Vec<String> = top_words(&m, &v, 0, 4)
            .unwrap()
            .into_iter()
            .map(|p| p.0)
            .collect();
        assert_eq!(names, ["apple", "kiwi", "mango", "pear"]);
    }

    #[test]
    fn params_validation() {
        assert!(matches!(
            LdaParams::new(1).validate(),
            Err(TopicError::TooFewTopics(1))
        ));
        let mut p = LdaParams::new(20);
        assert_eq!(p.alpha, 2.5);
        p.beta = 0.0;
        assert!(matches!(
            p.validate(),
            Err(TopicError::InvalidHyperparameter { name: "beta", .. })
        ));
        p.beta = 0.01;
        p.iterations = 0;
        assert!(matches!(p.validate(), Err(TopicError::NoIterations)));
    }

    #[test]
    fn distribution_helpers() {
        let u = TopicDistribution::uniform(4);
        assert!(check_simplex(u.as_slice()).is_ok());
        assert_eq!(u.argmax(), 0);
        let t = TopicDistribution::from_counts(&[3, 1], 0.5);
        assert_eq!(t.as_slice(), [3.5 / 5.0, 1.5 / 5.0]);
        assert!(TopicDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(TopicDistribution::new(vec![1.5, -0.5]).is_err());
    }
}
