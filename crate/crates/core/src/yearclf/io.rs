//! `CHRONO-SVM 1` model section.
//!
//! ```text
//! CHRONO-SVM 1
//! classes <year> <year> ...
//! dim <n>
//! C <real>
//! epochs <n>
//! seed <u64>
//! class <year> <bias> <w_1> ... <w_dim>     (one line per class)
//! ```

use std::fmt::Write;

use super::{SvmError, SvmParams, YearClassifier};
use crate::textfmt::{join_sig12, sig12, LineReader};

pub const SVM_HEADER: &str = "CHRONO-SVM 1";

pub fn write_svm_section(clf: &YearClassifier) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{SVM_HEADER}");
    let years: Vec<String> = clf.classes().iter().map(i32::to_string).collect();
    let _ = writeln!(s, "classes {}", years.join(" "));
    let _ = writeln!(s, "dim {}", clf.dim());
    let _ = writeln!(s, "C {}", sig12(clf.params().c));
    let _ = writeln!(s, "epochs {}", clf.params().epochs);
    let _ = writeln!(s, "seed {}", clf.params().seed);
    for ((year, w), b) in clf.classes().iter().zip(clf.weights()).zip(clf.biases()) {
        let _ = writeln!(s, "class {year} {} {}", sig12(*b), join_sig12(w));
    }
    s
}

pub fn parse_svm_section(text: &str) -> Result<YearClassifier, SvmError> {
    read_svm_section(&mut LineReader::new(text))
}

pub(crate) fn read_svm_section(r: &mut LineReader<'_>) -> Result<YearClassifier, SvmError> {
    r.expect(SVM_HEADER)?;
    let classes_line = r.next_line()?;
    let classes: Vec<i32> = match classes_line.strip_prefix("classes ") {
        Some(rest) => r.parse_all(rest)?,
        None => return Err(r.error("expected field \"classes\"").into()),
    };
    let dim: usize = r.field("dim")?;
    let params = SvmParams {
        c: r.field("C")?,
        epochs: r.field("epochs")?,
        seed: r.field("seed")?,
    };
    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for &year in &classes {
        let line = r.next_line()?;
        let rest = line
            .strip_prefix("class ")
            .ok_or_else(|| r.error("expected \"class\" line"))?;
        let (label, values) = rest
            .split_once(' ')
            .ok_or_else(|| r.error("expected \"class <year> <bias> <weights>\""))?;
        if r.parse::<i32>(label)? != year {
            return Err(r.error(format!("expected weights for class {year}")).into());
        }
        let values: Vec<f64> = r.parse_all(values)?;
        if values.len() != dim + 1 {
            return Err(r
                .error(format!(
                    "expected {} values, found {}",
                    dim + 1,
                    values.len()
                ))
                .into());
        }
        biases.push(values[0]);
        weights.push(values[1..].to_vec());
    }
    YearClassifier::from_parts(classes, weights, biases, params).map_err(|m| r.error(m).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::yearclf::train_svm;

    #[test]
    fn round_trip_is_byte_exact() {
        let xs = vec![
            vec![0.9, 0.1],
            vec![0.8, 0.2],
            vec![0.1, 0.9],
            vec![0.3, 0.7],
        ];
        let clf = train_svm(&xs, &[1999, 1999, 2003, 2003], &SvmParams::default()).unwrap();
        let text = write_svm_section(&clf);
        assert!(text.starts_with("CHRONO-SVM 1\nclasses 1999 2003\ndim 2\n"));
        let back = parse_svm_section(&text).unwrap();
        assert_eq!(write_svm_section(&back), text);
        for x in &xs {
            assert_eq!(back.predict_year(x).unwrap(), clf.predict_year(x).unwrap());
        }
    }

    #[test]
    fn rejects_mislabelled_class_line() {
        let clf = YearClassifier::from_parts(
            vec![1, 2],
            vec![vec![1.0], vec![2.0]],
            vec![0.0, 0.5],
            SvmParams::default(),
        )
        .unwrap();
        let text = write_svm_section(&clf).replace("class 2 ", "class 3 ");
        let err = parse_svm_section(&text).unwrap_err();
        assert!(err.to_string().contains("line 8"), "{err}");
    }
}
