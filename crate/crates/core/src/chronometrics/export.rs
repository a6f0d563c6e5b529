//! CSV encodings of scores, confusion matrices and prediction records.

use std::io::{Read, Write};

use super::{ConfusionMatrix, PredictionRecord, YearScore};

pub const YEAR_SCORE_HEADER: [&str; 9] = [
    "year",
    "score",
    "err_future",
    "err_past",
    "n_papers",
    "n_future",
    "n_past",
    "norm_future",
    "norm_past",
];

/// Rows in the given order; callers pass `rank_years` output.
pub fn write_year_scores_csv<W: Write>(scores: &[YearScore], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(YEAR_SCORE_HEADER)?;
    for s in scores {
        w.write_record([
            s.year.to_string(),
            s.score.to_string(),
            s.err_future.to_string(),
            s.err_past.to_string(),
            s.n_papers.to_string(),
            s.n_future.to_string(),
            s.n_past.to_string(),
            s.norm_future.to_string(),
            s.norm_past.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// First row and column hold the class years; cell `(i, j)` counts
/// documents from year `i` predicted as year `j`.
pub fn write_confusion_csv<W: Write>(cm: &ConfusionMatrix, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["true\\predicted".to_string()];
    header.extend(cm.classes().iter().map(i32::to_string));
    w.write_record(&header)?;
    for (year, row) in cm.classes().iter().zip(cm.counts()) {
        let mut record = vec![year.to_string()];
        record.extend(row.iter().map(u64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// `doc_id,true_year,predicted_year`.
pub fn write_predictions_csv<W: Write>(records: &[PredictionRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_predictions_csv<R: Read>(input: R) -> csv::Result<Vec<PredictionRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
