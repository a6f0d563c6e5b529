//! End-to-end model: vocabulary, topic model and year classifier trained
//! together, stored as one text file.
//!
//! Documents with no in-vocabulary tokens are left out of topic and
//! classifier training. They keep the uniform topic distribution and are
//! still predicted and scored, so per-year document counts stay intact.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::chronometrics::{BoxError, FoldPredictor, PredictionRecord};
use crate::corpus::{
    build_vocabulary, vectorize, BowVector, Corpus, CorpusError, Document, TokenizerSettings,
    Vocabulary,
};
use crate::rng;
use crate::textfmt::{LineReader, ParseError};
use crate::topics::{
    infer_theta, read_lda_section, train_lda, write_lda_section, LdaParams, TopicDistribution,
    TopicError, TopicModel,
};
use crate::yearclf::{
    read_svm_section, train_svm, write_svm_section, SvmError, SvmParams, YearClassifier,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Topics(#[from] TopicError),
    #[error(transparent)]
    Classifier(#[from] SvmError),
    #[error("model file {0}")]
    Format(#[from] ParseError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Every tunable of the pipeline except the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSettings {
    pub tokenizer: TokenizerSettings,
    pub min_df: usize,
    pub k_topics: usize,
    /// `None` means 50 / K.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub lda_iterations: usize,
    /// Fold-in sweeps for documents outside the training set.
    pub infer_iterations: usize,
    pub svm_c: f64,
    pub svm_epochs: usize,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        Self {
            tokenizer: TokenizerSettings::default(),
            min_df: 5,
            k_topics: 20,
            alpha: None,
            beta: LdaParams::DEFAULT_BETA,
            lda_iterations: LdaParams::DEFAULT_ITERATIONS,
            infer_iterations: 200,
            svm_c: 1.0,
            svm_epochs: 100,
        }
    }
}

impl PipelineSettings {
    pub fn lda_params(&self, seed: u64) -> LdaParams {
        LdaParams {
            k: self.k_topics,
            alpha: self
                .alpha
                .unwrap_or_else(|| LdaParams::default_alpha(self.k_topics)),
            beta: self.beta,
            iterations: self.lda_iterations,
            seed,
        }
    }

    pub fn svm_params(&self, seed: u64) -> SvmParams {
        SvmParams {
            c: self.svm_c,
            epochs: self.svm_epochs,
            seed,
        }
    }
}

/// A trained vocabulary + topic model + classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub vocab: Vocabulary,
    pub topics: TopicModel,
    pub classifier: YearClassifier,
}

/// Year prediction for one piece of text.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub year: i32,
    pub theta: TopicDistribution,
    /// Decision score per class year, in class order.
    pub scores: Vec<(i32, f64)>,
    /// No token of the text was in the vocabulary.
    pub empty: bool,
}

impl TrainedModel {
    pub fn to_text(&self) -> String {
        let mut s = write_lda_section(&self.vocab, &self.topics);
        s.push_str(&write_svm_section(&self.classifier));
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PipelineError> {
        let mut r = LineReader::new(text);
        let (vocab, topics) = read_lda_section(&mut r)?;
        let classifier = read_svm_section(&mut r)?;
        if let Some(extra) = r.peek() {
            return Err(r
                .error(format!("unexpected trailing line \"{extra}\""))
                .into());
        }
        if classifier.dim() != topics.k() {
            return Err(r
                .error(format!(
                    "classifier dimension {} does not match {} topics",
                    classifier.dim(),
                    topics.k()
                ))
                .into());
        }
        Ok(Self {
            vocab,
            topics,
            classifier,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), PipelineError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_text(&text)
    }

    /// Bag of words for arbitrary text. Stored terms already passed the
    /// training tokenizer's length and stopword filters, so a permissive
    /// tokenizer followed by the vocabulary lookup gives the same counts.
    pub fn vectorize_text(&self, text: &str) -> BowVector {
        vectorize(
            &Document::new("input", 2000, text),
            &self.vocab,
            &TokenizerSettings::permissive(),
        )
    }

    pub fn predict_bow(
        &self,
        bow: &BowVector,
        iterations: usize,
        seed: u64,
    ) -> Result<Prediction, PipelineError> {
        let inference = infer_theta(&self.topics, bow, iterations, seed)?;
        self.predict_theta(inference.theta, inference.empty)
    }

    pub fn predict_text(
        &self,
        text: &str,
        iterations: usize,
        seed: u64,
    ) -> Result<Prediction, PipelineError> {
        self.predict_bow(&self.vectorize_text(text), iterations, seed)
    }

    fn predict_theta(
        &self,
        theta: TopicDistribution,
        empty: bool,
    ) -> Result<Prediction, PipelineError> {
        let scores = self.classifier.decision_scores(theta.as_slice())?;
        Ok(Prediction {
            year: self.classifier.predict_year(theta.as_slice())?,
            scores: self
                .classifier
                .classes()
                .iter()
                .copied()
                .zip(scores)
                .collect(),
            theta,
            empty,
        })
    }
}

/// Result of training on a whole corpus.
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub model: TrainedModel,
    /// Training-time distribution per corpus document; uniform for
    /// documents left out as empty.
    pub thetas: Vec<TopicDistribution>,
    /// Corpus indices of documents with no in-vocabulary tokens.
    pub empty_docs: Vec<usize>,
    pub log_likelihood: Vec<(usize, f64)>,
}

impl FitOutput {
    /// Predictions for the training documents from their training-time
    /// distributions, in corpus order.
    pub fn resubstitution_records(
        &self,
        corpus: &Corpus,
    ) -> Result<Vec<PredictionRecord>, PipelineError> {
        corpus
            .documents()
            .iter()
            .zip(&self.thetas)
            .map(|(doc, theta)| {
                let year = self.model.classifier.predict_year(theta.as_slice())?;
                Ok(PredictionRecord::new(doc.id.clone(), doc.year, year))
            })
            .collect()
    }
}

/// Builds the vocabulary, trains LDA on the non-empty documents and the
/// classifier on their topic distributions.
pub fn fit(
    corpus: &Corpus,
    settings: &PipelineSettings,
    seed: u64,
) -> Result<FitOutput, PipelineError> {
    let vocab = build_vocabulary(corpus, settings.min_df, &settings.tokenizer)?;
    let bows: Vec<BowVector> = corpus
        .documents()
        .iter()
        .map(|d| vectorize(d, &vocab, &settings.tokenizer))
        .collect();
    let (kept, empty_docs): (Vec<usize>, Vec<usize>) =
        (0..bows.len()).partition(|&i| !bows[i].is_empty());
    let train_bows: Vec<BowVector> = kept.iter().map(|&i| bows[i].clone()).collect();

    let lda = train_lda(&train_bows, vocab.len(), &settings.lda_params(seed))?;
    let labels: Vec<i32> = kept.iter().map(|&i| corpus.documents()[i].year).collect();
    let classifier = train_svm(&lda.thetas, &labels, &settings.svm_params(seed))?;

    let mut thetas = vec![TopicDistribution::uniform(settings.k_topics); corpus.len()];
    for (&i, theta) in kept.iter().zip(lda.thetas) {
        thetas[i] = theta;
    }
    Ok(FitOutput {
        model: TrainedModel {
            vocab,
            topics: lda.model,
            classifier,
        },
        thetas,
        empty_docs,
        log_likelihood: lda.log_likelihood,
    })
}

/// Fold-in seed for the `index`-th document predicted under `seed`.
pub fn document_seed(seed: u64, index: usize) -> u64 {
    rng::derive(seed, index as u64)
}

impl FoldPredictor for PipelineSettings {
    /// Trains on `train`, then predicts `test` from fold-in distributions.
    fn fit_predict(
        &self,
        train: &Corpus,
        test: &[Document],
        seed: u64,
    ) -> Result<Vec<i32>, BoxError> {
        let fitted = fit(train, self, seed)?;
        let model = &fitted.model;
        test.iter()
            .enumerate()
            .map(|(i, doc)| {
                let bow = vectorize(doc, &model.vocab, &self.tokenizer);
                let p = model.predict_bow(&bow, self.infer_iterations, document_seed(seed, i))?;
                Ok(p.year)
            })
            .collect()
    }
}
