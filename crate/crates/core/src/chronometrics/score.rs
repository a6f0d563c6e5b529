//! Innovation score of a year.
//!
//! For the documents `P_y` of year `y`:
//!
//! ```text
//! S(y) = Err_F / |P_y| * N_F(y)  -  Err_P / |P_y| * N_P(y)
//! Err_F = sum of (predicted - y) over documents predicted after y
//! Err_P = sum of (y - predicted) over documents predicted before y
//! N_F(y) = 1 / (Y_e - y)     (0 when y = Y_e)
//! N_P(y) = 1 / (y - Y_b)     (0 when y = Y_b)
//! ```
//!
//! `Err / |P_y|` can be at most `Y_e - y` forward and `y - Y_b` backward,
//! so both normalized terms lie in `[0, 1]`.

use std::collections::BTreeMap;

use super::{MetricsError, PredictionRecord};
use crate::corpus::Corpus;

/// Score of one year together with every component it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct YearScore {
    pub year: i32,
    pub score: f64,
    pub err_future: u64,
    pub err_past: u64,
    pub n_papers: usize,
    pub n_future: usize,
    pub n_past: usize,
    pub norm_future: f64,
    pub norm_past: f64,
}

impl YearScore {
    /// Recombines the stored components.
    pub fn combine(
        err_future: u64,
        err_past: u64,
        n_papers: usize,
        norm_future: f64,
        norm_past: f64,
    ) -> f64 {
        let n = n_papers as f64;
        err_future as f64 / n * norm_future - err_past as f64 / n * norm_past
    }
}

pub fn norm_future(y: i32, y_end: i32) -> f64 {
    if y < y_end {
        1.0 / f64::from(y_end - y)
    } else {
        0.0
    }
}

pub fn norm_past(y: i32, y_begin: i32) -> f64 {
    if y > y_begin {
        1.0 / f64::from(y - y_begin)
    } else {
        0.0
    }
}

/// Scores year `y` from the predictions for its documents. Every record
/// must have true year `y` and a prediction inside `[y_begin, y_end]`.
pub fn innovation_score(
    records_for_year: &[PredictionRecord],
    y: i32,
    y_begin: i32,
    y_end: i32,
) -> Result<YearScore, MetricsError> {
    let in_span = |year: i32| {
        if (y_begin..=y_end).contains(&year) {
            Ok(())
        } else {
            Err(MetricsError::OutsideSpan {
                year,
                begin: y_begin,
                end: y_end,
            })
        }
    };
    in_span(y)?;
    if records_for_year.is_empty() {
        return Err(MetricsError::EmptyYear(y));
    }

    let (mut err_future, mut err_past) = (0u64, 0u64);
    let (mut n_future, mut n_past) = (0usize, 0usize);
    for r in records_for_year {
        if r.true_year != y {
            return Err(MetricsError::WrongYear {
                doc_id: r.doc_id.clone(),
                expected: y,
                actual: r.true_year,
            });
        }
        in_span(r.predicted_year)?;
        let e = r.error();
        if e > 0 {
            err_future += e.unsigned_abs();
            n_future += 1;
        } else if e < 0 {
            err_past += e.unsigned_abs();
            n_past += 1;
        }
    }

    let n_papers = records_for_year.len();
    let norm_future = norm_future(y, y_end);
    let norm_past = norm_past(y, y_begin);
    Ok(YearScore {
        year: y,
        score: YearScore::combine(err_future, err_past, n_papers, norm_future, norm_past),
        err_future,
        err_past,
        n_papers,
        n_future,
        n_past,
        norm_future,
        norm_past,
    })
}

/// Scores every year that has records, over the corpus span, sorted by
/// score descending with earlier years first on ties.
pub fn rank_years(
    all_records: &[PredictionRecord],
    corpus: &Corpus,
) -> Result<Vec<YearScore>, MetricsError> {
    let mut by_year: BTreeMap<i32, Vec<PredictionRecord>> = BTreeMap::new();
    for r in all_records {
        if !corpus.present_years().contains(&r.true_year) {
            return Err(MetricsError::YearNotInClasses(r.true_year));
        }
        by_year.entry(r.true_year).or_default().push(r.clone());
    }
    let mut scores = by_year
        .iter()
        .map(|(&y, recs)| innovation_score(recs, y, corpus.year_begin(), corpus.year_end()))
        .collect::<Result<Vec<_>, _>>()?;
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.year.cmp(&b.year)));
    Ok(scores)
}
