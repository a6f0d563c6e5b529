//! TOML epoch specification.
//!
//! ```toml
//! seed = 7
//! blend_width = 0            # optional
//!
//! [topics]                   # generated disjoint blocks ...
//! count = 6
//! words_per_topic = 30
//! shared_words = 0           # optional
//! shared_weight = 0.0        # optional
//! # ... or an explicit matrix instead of the three fields above:
//! # topic_word = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]]
//!
//! [[epoch]]
//! start = 1990
//! end = 1999
//! mixture = [0.45, 0.45, 0.025, 0.025, 0.025, 0.025]
//! docs_per_year = 20
//! doc_length = 100
//! ```

use serde::{Deserialize, Serialize};

use super::{disjoint_topics, generate_blended, EpochSpec, SynthError, SyntheticTruth};
use crate::corpus::Corpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicsSpec {
    pub count: Option<usize>,
    pub words_per_topic: Option<usize>,
    #[serde(default)]
    pub shared_words: usize,
    #[serde(default)]
    pub shared_weight: f64,
    pub topic_word: Option<Vec<Vec<f64>>>,
}

impl TopicsSpec {
    pub fn topic_word(&self) -> Result<Vec<Vec<f64>>, SynthError> {
        match (&self.topic_word, self.count, self.words_per_topic) {
            (Some(rows), None, None) => Ok(rows.clone()),
            (None, Some(k), Some(w)) if k >= 1 && w >= 1 => {
                Ok(disjoint_topics(k, w, self.shared_words, self.shared_weight))
            }
            _ => Err(SynthError::Spec(
                "[topics] needs either topic_word or count and words_per_topic (both at least 1)"
                    .into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    #[serde(default)]
    pub blend_width: u32,
    pub topics: TopicsSpec,
    #[serde(rename = "epoch")]
    pub epochs: Vec<EpochSpec>,
}

impl SynthSpec {
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::Spec(e.to_string()))
    }

    /// Seed override, e.g. from a command-line flag.
    pub fn generate(&self, seed: Option<u64>) -> Result<(Corpus, SyntheticTruth), SynthError> {
        generate_blended(
            &self.epochs,
            &self.topics.topic_word()?,
            seed.unwrap_or(self.seed),
            self.blend_width,
        )
    }
}

impl SyntheticTruth {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("truth serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::Spec(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPEC: &str = r#"
seed = 5
[topics]
count = 2
words_per_topic = 3

[[epoch]]
start = 2000
end = 2001
mixture = [0.9, 0.1]
docs_per_year = 2
doc_length = 10

[[epoch]]
start = 2002
end = 2004
mixture = [0.1, 0.9]
docs_per_year = 3
doc_length = 10
"#;

    #[test]
    fn parses_and_generates() {
        let spec = SynthSpec::from_toml(SPEC).unwrap();
        let (corpus, truth) = spec.generate(None).unwrap();
        assert_eq!(corpus.len(), 2 * 2 + 3 * 3);
        assert_eq!(truth.boundaries, [2002]);
        assert_eq!(truth.seed, 5);
        assert_eq!(SyntheticTruth::from_toml(&truth.to_toml()).unwrap(), truth);
        let (_, other) = spec.generate(Some(6)).unwrap();
        assert_eq!(other.seed, 6);
    }

    #[test]
    fn explicit_matrix_and_errors() {
        let explicit = SPEC.replace(
            "count = 2\nwords_per_topic = 3",
            "topic_word = [[1.0, 0.0], [0.0, 1.0]]",
        );
        let spec = SynthSpec::from_toml(&explicit).unwrap();
        assert_eq!(spec.topics.topic_word().unwrap().len(), 2);

        let both = SPEC.replace("count = 2", "count = 2\ntopic_word = [[1.0]]");
        assert!(SynthSpec::from_toml(&both).unwrap().generate(None).is_err());
        assert!(SynthSpec::from_toml("seed = 1").is_err());
        assert!(SynthSpec::from_toml(&SPEC.replace("seed = 5", "seed = 5\nbogus = 1")).is_err());
    }
}
