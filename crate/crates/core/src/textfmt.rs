//! Line-oriented text encoding shared by the model file sections.
//!
//! Reals are written with 12 significant digits in scientific notation.
//! Parsing such a string and re-encoding it gives back the same bytes, so
//! a model file read and written again is unchanged.

use std::str::FromStr;

pub(crate) fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub(crate) fn join_sig12(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| sig12(v))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Cursor over the lines of a model file, tracking 1-based line numbers.
pub(crate) struct LineReader<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> LineReader<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().peekable(),
            line: 0,
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            message: message.into(),
        }
    }

    pub(crate) fn peek(&mut self) -> Option<&'a str> {
        self.lines.peek().copied()
    }

    pub(crate) fn next_line(&mut self) -> Result<&'a str, ParseError> {
        self.line += 1;
        self.lines
            .next()
            .ok_or_else(|| self.error("unexpected end of file"))
    }

    pub(crate) fn expect(&mut self, literal: &str) -> Result<(), ParseError> {
        let line = self.next_line()?;
        if line == literal {
            Ok(())
        } else {
            Err(self.error(format!("expected \"{literal}\", found \"{line}\"")))
        }
    }

    /// Reads a `key value` line and parses the value.
    pub(crate) fn field<T: FromStr>(&mut self, key: &str) -> Result<T, ParseError> {
        let line = self.next_line()?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.error(format!("expected field \"{key}\"")))?;
        self.parse(value)
    }

    pub(crate) fn parse<T: FromStr>(&self, token: &str) -> Result<T, ParseError> {
        token
            .parse()
            .map_err(|_| self.error(format!("cannot parse \"{token}\"")))
    }

    pub(crate) fn parse_all<T: FromStr>(&self, tokens: &str) -> Result<Vec<T>, ParseError> {
        tokens
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| self.parse(t))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(sig12(0.5), "5.00000000000e-1");
        assert_eq!(sig12(25.0), "2.50000000000e1");
        assert_eq!(sig12(-1.0 / 3.0), "-3.33333333333e-1");
    }

    #[test]
    fn reader_reports_line_numbers() {
        let mut r = LineReader::new("HEAD\nK 3\nV x\n");
        r.expect("HEAD").unwrap();
        assert_eq!(r.field::<usize>("K").unwrap(), 3);
        let err = r.field::<usize>("V").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(r.next_line().is_err());
    }

    proptest! {
        #[test]
        fn reencoding_is_stable(x in prop::num::f64::NORMAL) {
            let once = sig12(x);
            let back: f64 = once.parse().unwrap();
            prop_assert_eq!(sig12(back), once);
        }
    }
}
