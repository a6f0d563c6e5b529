use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    confusion_matrix, mean_absolute_error, BoxError, ConfusionMatrix, MetricsError,
    PredictionRecord,
};
use crate::corpus::{Corpus, Document};
use crate::rng;

/// Anything that can be trained on one split and predict years for another.
pub trait FoldPredictor: Sync {
    fn fit_predict(
        &self,
        train: &Corpus,
        test: &[Document],
        seed: u64,
    ) -> Result<Vec<i32>, BoxError>;
}

/// Predicts every document's true year. Used to check the evaluation
/// plumbing in isolation.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPredictor;

impl FoldPredictor for IdentityPredictor {
    fn fit_predict(
        &self,
        _train: &Corpus,
        test: &[Document],
        _seed: u64,
    ) -> Result<Vec<i32>, BoxError> {
        Ok(test.iter().map(|d| d.year).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Document indices of each test fold, ascending.
    pub folds: Vec<Vec<usize>>,
    pub fold_mae: Vec<f64>,
    pub mean_mae: f64,
    pub confusion: ConfusionMatrix,
    /// One record per document, in corpus order.
    pub records: Vec<PredictionRecord>,
}

/// Stratified k-fold split. Each year's documents are shuffled by a seeded
/// generator (years in ascending order), then dealt round-robin with a
/// single counter running across all years. Per-year counts of any two
/// folds differ by at most one, and so do fold sizes.
pub fn stratified_folds(
    years: &[i32],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, MetricsError> {
    if k < 2 || k > years.len() {
        return Err(MetricsError::InvalidFolds { k, n: years.len() });
    }
    let mut by_year: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &y) in years.iter().enumerate() {
        by_year.entry(y).or_default().push(i);
    }
    let mut rng = rng::seeded(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for members in by_year.values_mut() {
        rng::shuffle(&mut rng, members);
        for &i in members.iter() {
            folds[next % k].push(i);
            next += 1;
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Runs k-fold cross-validation. Fold `f` is trained with seed `seed + f`,
/// so results do not depend on the order folds execute in.
pub fn cross_validate(
    corpus: &Corpus,
    predictor: &dyn FoldPredictor,
    k: usize,
    seed: u64,
) -> Result<EvaluationReport, MetricsError> {
    let years: Vec<i32> = corpus.years().collect();
    let folds = stratified_folds(&years, k, seed)?;

    let predictions: Vec<Vec<i32>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let fail = |source: BoxError| MetricsError::Fold { fold: f, source };
            let mut in_test = vec![false; corpus.len()];
            test_idx.iter().for_each(|&i| in_test[i] = true);
            let train_idx: Vec<usize> = (0..corpus.len()).filter(|&i| !in_test[i]).collect();
            let train = corpus.subset(&train_idx).map_err(|e| fail(e.into()))?;
            let test: Vec<Document> = test_idx
                .iter()
                .map(|&i| corpus.documents()[i].clone())
                .collect();
            let predicted = predictor
                .fit_predict(&train, &test, seed.wrapping_add(f as u64))
                .map_err(fail)?;
            if predicted.len() != test.len() {
                return Err(fail(
                    format!(
                        "{} predictions for {} documents",
                        predicted.len(),
                        test.len()
                    )
                    .into(),
                ));
            }
            Ok(predicted)
        })
        .collect::<Result<_, _>>()?;

    let mut slots: Vec<Option<PredictionRecord>> = vec![None; corpus.len()];
    let mut fold_mae = Vec::with_capacity(k);
    for (test_idx, predicted) in folds.iter().zip(&predictions) {
        let fold_records: Vec<PredictionRecord> = test_idx
            .iter()
            .zip(predicted)
            .map(|(&i, &p)| {
                let doc = &corpus.documents()[i];
                PredictionRecord::new(doc.id.clone(), doc.year, p)
            })
            .collect();
        fold_mae.push(mean_absolute_error(&fold_records)?);
        for (&i, r) in test_idx.iter().zip(fold_records) {
            slots[i] = Some(r);
        }
    }
    let records: Vec<PredictionRecord> = slots
        .into_iter()
        .map(|r| r.expect("folds partition the corpus"))
        .collect();
    let classes: Vec<i32> = corpus.present_years().iter().copied().collect();
    let confusion = confusion_matrix(&records, &classes)?;
    let mean_mae = fold_mae.iter().sum::<f64>() / fold_mae.len() as f64;
    Ok(EvaluationReport {
        folds,
        fold_mae,
        mean_mae,
        confusion,
        records,
    })
}
