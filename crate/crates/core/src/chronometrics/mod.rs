//! Year scoring and evaluation metrics over prediction records.

mod crossval;
mod export;
mod score;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crossval::{
    cross_validate, stratified_folds, EvaluationReport, FoldPredictor, IdentityPredictor,
};
pub use export::{
    read_predictions_csv, write_confusion_csv, write_predictions_csv, write_year_scores_csv,
    YEAR_SCORE_HEADER,
};
pub use score::{innovation_score, norm_future, norm_past, rank_years, YearScore};

pub type BoxError = Box<dyn std::error::Error + Send + Sync>;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no prediction records")]
    NoRecords,
    #[error("year {0} is not one of the classes")]
    YearNotInClasses(i32),
    #[error("no records for year {0}")]
    EmptyYear(i32),
    #[error("record for document \"{doc_id}\" has true year {actual}, expected {expected}")]
    WrongYear {
        doc_id: String,
        expected: i32,
        actual: i32,
    },
    #[error("year {year} outside the span [{begin}, {end}]")]
    OutsideSpan { year: i32, begin: i32, end: i32 },
    #[error("cannot split {n} documents into {k} folds")]
    InvalidFolds { k: usize, n: usize },
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: BoxError,
    },
}

/// A document's true and predicted publication year.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub doc_id: String,
    pub true_year: i32,
    pub predicted_year: i32,
}

impl PredictionRecord {
    pub fn new(doc_id: impl Into<String>, true_year: i32, predicted_year: i32) -> Self {
        Self {
            doc_id: doc_id.into(),
            true_year,
            predicted_year,
        }
    }

    /// Signed error `predicted - true`.
    pub fn error(&self) -> i64 {
        i64::from(self.predicted_year) - i64::from(self.true_year)
    }
}

pub fn mean_absolute_error(records: &[PredictionRecord]) -> Result<f64, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::NoRecords);
    }
    let total: u64 = records.iter().map(|r| r.error().unsigned_abs()).sum();
    Ok(total as f64 / records.len() as f64)
}

/// Counts indexed `[true][predicted]` over an ordered class list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<i32>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn classes(&self) -> &[i32] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, year: i32) -> Option<u64> {
        let i = self.classes.binary_search(&year).ok()?;
        Some(self.counts[i].iter().sum())
    }

    /// Fraction of the mass whose true and predicted year fall in the same
    /// block. Blocks are inclusive year ranges; years outside every block
    /// count as off-block.
    pub fn block_mass(&self, blocks: &[(i32, i32)]) -> f64 {
        let block_of = |y: i32| blocks.iter().position(|&(a, b)| a <= y && y <= b);
        let mut inside = 0;
        for (i, &t) in self.classes.iter().enumerate() {
            for (j, &p) in self.classes.iter().enumerate() {
                if block_of(t).is_some() && block_of(t) == block_of(p) {
                    inside += self.counts[i][j];
                }
            }
        }
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            inside as f64 / total as f64
        }
    }
}

pub fn confusion_matrix(
    records: &[PredictionRecord],
    classes: &[i32],
) -> Result<ConfusionMatrix, MetricsError> {
    let mut sorted = classes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let position: BTreeMap<i32, usize> = sorted.iter().enumerate().map(|(i, &y)| (y, i)).collect();
    let mut counts = vec![vec![0u64; sorted.len()]; sorted.len()];
    for r in records {
        let i = *position
            .get(&r.true_year)
            .ok_or(MetricsError::YearNotInClasses(r.true_year))?;
        let j = *position
            .get(&r.predicted_year)
            .ok_or(MetricsError::YearNotInClasses(r.predicted_year))?;
        counts[i][j] += 1;
    }
    Ok(ConfusionMatrix {
        classes: sorted,
        counts,
    })
}
