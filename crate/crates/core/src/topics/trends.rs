use std::collections::BTreeMap;
use std::io::Write;

use super::{TopicDistribution, TopicError};
use crate::corpus::Corpus;

/// Mean topic proportion per present year.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSeries {
    pub topic: usize,
    pub by_year: BTreeMap<i32, f64>,
}

/// For each topic, the mean of its proportion over the documents of every
/// present year. `thetas` holds one distribution per corpus document.
pub fn topic_trends(
    thetas: &[TopicDistribution],
    corpus: &Corpus,
) -> Result<Vec<TrendSeries>, TopicError> {
    if thetas.len() != corpus.len() {
        return Err(TopicError::LengthMismatch {
            expected: corpus.len(),
            actual: thetas.len(),
        });
    }
    let k = thetas[0].len();
    if let Some(bad) = thetas.iter().find(|t| t.len() != k) {
        return Err(TopicError::LengthMismatch {
            expected: k,
            actual: bad.len(),
        });
    }

    let mut sums: BTreeMap<i32, (Vec<f64>, usize)> = BTreeMap::new();
    for (theta, year) in thetas.iter().zip(corpus.years()) {
        let (acc, n) = sums.entry(year).or_insert_with(|| (vec![0.0; k], 0));
        for (a, &p) in acc.iter_mut().zip(theta.as_slice()) {
            *a += p;
        }
        *n += 1;
    }
    Ok((0..k)
        .map(|topic| TrendSeries {
            topic,
            by_year: sums
                .iter()
                .map(|(&y, (acc, n))| (y, acc[topic] / *n as f64))
                .collect(),
        })
        .collect())
}

/// `topic,year,mean_theta`, topics in order, years ascending.
pub fn write_trends_csv<W: Write>(trends: &[TrendSeries], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["topic", "year", "mean_theta"])?;
    for series in trends {
        for (year, mean) in &series.by_year {
            w.write_record([series.topic.to_string(), year.to_string(), mean.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    #[test]
    fn mean_per_year() {
        let corpus = Corpus::new(vec![
            Document::new("a", 2001, ""),
            Document::new("b", 2001, ""),
            Document::new("c", 2003, ""),
        ])
        .unwrap();
        let thetas = vec![
            TopicDistribution::new(vec![0.2, 0.8]).unwrap(),
            TopicDistribution::new(vec![0.4, 0.6]).unwrap(),
            TopicDistribution::new(vec![1.0, 0.0]).unwrap(),
        ];
        let trends = topic_trends(&thetas, &corpus).unwrap();
        assert_eq!(trends.len(), 2);
        assert!((trends[0].by_year[&2001] - 0.3).abs() < 1e-15);
        assert_eq!(trends[0].by_year[&2003], 1.0);
        for y in [2001, 2003] {
            let total: f64 = trends.iter().map(|t| t.by_year[&y]).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
        assert_eq!(
            trends[1].by_year.keys().copied().collect::<Vec<_>>(),
            [2001, 2003]
        );
        assert!(topic_trends(&thetas[..2], &corpus).is_err());

        let mut buf = Vec::new();
        write_trends_csv(&trends, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("topic,year,mean_theta\n0,2001,"));
        assert_eq!(text.lines().count(), 5);
    }
}
