use std::collections::HashSet;
use std::path::Path;

use super::CorpusError;

pub const DEFAULT_MIN_TOKEN_LEN: usize = 3;

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerSettings {
    /// Minimum token length in characters.
    pub min_len: usize,
    pub stopwords: HashSet<String>,
}

impl Default for TokenizerSettings {
    /// Minimum length 3 and the bundled English stopword list.
    fn default() -> Self {
        Self {
            min_len: DEFAULT_MIN_TOKEN_LEN,
            stopwords: parse_stopwords(BUNDLED_STOPWORDS),
        }
    }
}

impl TokenizerSettings {
    /// Keeps every alphabetic run: no length floor, no stopwords.
    pub fn permissive() -> Self {
        Self {
            min_len: 1,
            stopwords: HashSet::new(),
        }
    }
}

fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Reads a stopword file: one token per line, `#` comments.
pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_stopwords(&text))
}

/// Lowercases, splits on every non-alphabetic character, and drops short
/// tokens and stopwords.
pub fn tokenize(text: &str, opts: &TokenizerSettings) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty() && t.chars().count() >= opts.min_len)
        .filter(|t| !opts.stopwords.contains(*t))
        .map(str::to_owned)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_text() {
        assert!(tokenize("", &TokenizerSettings::default()).is_empty());
    }

    #[test]
    fn punctuation_and_stopwords() {
        let t = tokenize("The Semantic Web, the Web!", &TokenizerSettings::default());
        assert_eq!(t, ["semantic", "web", "web"]);
    }

    #[test]
    fn digits_and_hyphens_split_runs() {
        let t = tokenize("LDA2000 topic-model", &TokenizerSettings::default());
        assert_eq!(t, ["lda", "topic", "model"]);
    }

    #[test]
    fn min_len_counts_characters() {
        let opts = TokenizerSettings {
            min_len: 3,
            stopwords: HashSet::new(),
        };
        assert_eq!(tokenize("éé ééé ab", &opts), ["ééé"]);
    }

    #[test]
    fn bundled_list_is_lowercase_and_nonempty() {
        let s = TokenizerSettings::default().stopwords;
        assert!(s.contains("the") && s.contains("and"));
        assert!(s.iter().all(|w| w.to_lowercase() == *w));
    }

    proptest! {
        #[test]
        fn idempotent_on_own_output(text in "[a-zA-Z0-9 ,.\\-éÉßΣσ]{0,80}") {
            let opts = TokenizerSettings::default();
            let once = tokenize(&text, &opts);
            let twice = tokenize(&once.join(" "), &opts);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_are_lowercase_alphabetic(text in "\\PC{0,60}") {
            let opts = TokenizerSettings::default();
            for tok in tokenize(&text, &opts) {
                prop_assert!(tok.chars().all(char::is_alphabetic));
                prop_assert!(tok.chars().count() >= opts.min_len);
                prop_assert!(!opts.stopwords.contains(&tok));
            }
        }
    }
}
