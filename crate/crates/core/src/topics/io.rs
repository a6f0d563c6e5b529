//! `CHRONO-LDA 1` model section.
//!
//! ```text
//! CHRONO-LDA 1
//! K <topics>
//! V <terms>
//! alpha <real>
//! beta <real>
//! seed <u64>
//! iterations <n>
//! min_df <n>
//! vocabulary
//! <term> <doc_freq>        (V lines, lexicographic)
//! phi
//! <V reals>                (K lines)
//! ```

use std::fmt::Write;

use super::{check_simplex, TopicError, TopicModel};
use crate::corpus::Vocabulary;
use crate::textfmt::{join_sig12, sig12, LineReader};

pub const LDA_HEADER: &str = "CHRONO-LDA 1";

pub fn write_lda_section(vocab: &Vocabulary, model: &TopicModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{LDA_HEADER}");
    let _ = writeln!(s, "K {}", model.k());
    let _ = writeln!(s, "V {}", model.vocab_size());
    let _ = writeln!(s, "alpha {}", sig12(model.alpha()));
    let _ = writeln!(s, "beta {}", sig12(model.beta()));
    let _ = writeln!(s, "seed {}", model.seed());
    let _ = writeln!(s, "iterations {}", model.iterations());
    let _ = writeln!(s, "min_df {}", vocab.min_df());
    s.push_str("vocabulary\n");
    for (term, df) in vocab.terms().iter().zip(vocab.doc_freq()) {
        let _ = writeln!(s, "{term} {df}");
    }
    s.push_str("phi\n");
    for row in model.phi_rows() {
        s.push_str(&join_sig12(row));
        s.push('\n');
    }
    s
}

pub fn parse_lda_section(text: &str) -> Result<(Vocabulary, TopicModel), TopicError> {
    read_lda_section(&mut LineReader::new(text))
}

pub(crate) fn read_lda_section(
    r: &mut LineReader<'_>,
) -> Result<(Vocabulary, TopicModel), TopicError> {
    r.expect(LDA_HEADER)?;
    let k: usize = r.field("K")?;
    let v: usize = r.field("V")?;
    let alpha: f64 = r.field("alpha")?;
    let beta: f64 = r.field("beta")?;
    let seed: u64 = r.field("seed")?;
    let iterations: usize = r.field("iterations")?;
    let min_df: usize = r.field("min_df")?;
    if k < 2 || v == 0 {
        return Err(r.error(format!("invalid dimensions K={k} V={v}")).into());
    }

    r.expect("vocabulary")?;
    let mut terms = Vec::with_capacity(v);
    let mut doc_freq = Vec::with_capacity(v);
    for _ in 0..v {
        let line = r.next_line()?;
        let (term, df) = line
            .split_once(' ')
            .ok_or_else(|| r.error("expected \"<term> <doc_freq>\""))?;
        terms.push(term.to_owned());
        doc_freq.push(r.parse(df)?);
    }
    let vocab = Vocabulary::from_parts(terms, doc_freq, min_df).map_err(|m| r.error(m))?;

    r.expect("phi")?;
    let mut phi = Vec::with_capacity(k * v);
    for _ in 0..k {
        let line = r.next_line()?;
        let row: Vec<f64> = r.parse_all(line)?;
        if row.len() != v {
            return Err(r
                .error(format!("expected {v} values, found {}", row.len()))
                .into());
        }
        check_simplex(&row).map_err(|m| r.error(m))?;
        phi.extend(row);
    }

    Ok((
        vocab,
        TopicModel {
            k,
            vocab_size: v,
            alpha,
            beta,
            iterations,
            seed,
            phi,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BowVector;
    use crate::topics::{train_lda, LdaParams};

    fn toy() -> (Vocabulary, TopicModel) {
        let vocab = Vocabulary::from_parts(
            ["graph", "search", "web"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            vec![2, 1, 3],
            1,
        )
        .unwrap();
        let docs = vec![
            BowVector::from_term_ids([0, 2, 2]),
            BowVector::from_term_ids([1, 2]),
            BowVector::from_term_ids([0, 0, 2]),
        ];
        let mut p = LdaParams::new(2);
        p.iterations = 40;
        (vocab, train_lda(&docs, 3, &p).unwrap().model)
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let (vocab, model) = toy();
        let text = write_lda_section(&vocab, &model);
        assert!(text.starts_with("CHRONO-LDA 1\nK 2\nV 3\n"));
        let (v2, m2) = parse_lda_section(&text).unwrap();
        assert_eq!(v2, vocab);
        assert_eq!(write_lda_section(&v2, &m2), text);
        let (v3, m3) = parse_lda_section(&write_lda_section(&v2, &m2)).unwrap();
        assert_eq!((v3, m3), (v2, m2));
    }

    #[test]
    fn rejects_corruption() {
        let (vocab, model) = toy();
        let text = write_lda_section(&vocab, &model);
        assert!(parse_lda_section(&text.replace("CHRONO-LDA 1", "CHRONO-LDA 2")).is_err());
        let truncated: String = text.lines().take(12).map(|l| format!("{l}\n")).collect();
        let err = parse_lda_section(&truncated).unwrap_err();
        assert!(err.to_string().contains("unexpected end of file"), "{err}");
        let phi_line = text.lines().last().unwrap();
        let skewed = text.replace(phi_line, &phi_line.replacen("e-1", "e0", 1));
        assert!(parse_lda_section(&skewed).is_err());
    }
}
