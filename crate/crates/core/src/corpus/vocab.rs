use std::collections::{BTreeMap, HashMap, HashSet};

use super::{tokenize, Corpus, CorpusError, Document, TokenizerSettings};

/// Lexicographically ordered term list with document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    min_df: usize,
}

impl Vocabulary {
    /// Rebuilds a vocabulary from stored terms. Terms must be strictly
    /// increasing and every frequency at least `min_df`.
    pub fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        min_df: usize,
    ) -> Result<Self, String> {
        if terms.is_empty() {
            return Err("empty vocabulary".into());
        }
        if terms.len() != doc_freq.len() {
            return Err(format!(
                "{} terms but {} document frequencies",
                terms.len(),
                doc_freq.len()
            ));
        }
        if let Some(w) = terms.windows(2).find(|w| w[0] >= w[1]) {
            return Err(format!("terms not strictly increasing at \"{}\"", w[1]));
        }
        if let Some(i) = doc_freq.iter().position(|&df| df < min_df) {
            return Err(format!(
                "term \"{}\" has df below min_df {min_df}",
                terms[i]
            ));
        }
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Self {
            terms,
            index,
            doc_freq,
            min_df,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, id: usize) -> Option<&str> {
        self.terms.get(id).map(String::as_str)
    }
}

/// Keeps tokens that occur in at least `min_df` documents.
pub fn build_vocabulary(
    corpus: &Corpus,
    min_df: usize,
    opts: &TokenizerSettings,
) -> Result<Vocabulary, CorpusError> {
    if min_df == 0 {
        return Err(CorpusError::InvalidMinDf);
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in corpus.documents() {
        let distinct: HashSet<String> = tokenize(&doc.text, opts).into_iter().collect();
        for tok in distinct {
            *df.entry(tok).or_insert(0) += 1;
        }
    }
    let (terms, doc_freq): (Vec<String>, Vec<usize>) =
        df.into_iter().filter(|&(_, n)| n >= min_df).unzip();
    if terms.is_empty() {
        return Err(CorpusError::EmptyVocabulary);
    }
    Ok(Vocabulary::from_parts(terms, doc_freq, min_df).expect("BTreeMap keys are sorted"))
}

/// Sparse term counts with strictly increasing term ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BowVector {
    entries: Vec<(usize, u32)>,
}

impl BowVector {
    /// Builds from `(term id, count)` pairs in any order; duplicates are
    /// summed and zero counts dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (id, n) in pairs {
            *acc.entry(id).or_insert(0) += n;
        }
        Self {
            entries: acc.into_iter().filter(|&(_, n)| n > 0).collect(),
        }
    }

    pub fn from_term_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        Self::from_pairs(ids.into_iter().map(|id| (id, 1)))
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_count(&self) -> usize {
        self.entries.iter().map(|&(_, n)| n as usize).sum()
    }

    /// Largest term id plus one, or 0 when empty.
    pub fn min_vocab_size(&self) -> usize {
        self.entries.last().map_or(0, |&(id, _)| id + 1)
    }

    /// Expands to one term id per token occurrence, in id order.
    pub fn token_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .flat_map(|&(id, n)| std::iter::repeat_n(id, n as usize))
    }
}

/// Counts in-vocabulary tokens; out-of-vocabulary tokens are dropped.
pub fn vectorize(doc: &Document, vocab: &Vocabulary, opts: &TokenizerSettings) -> BowVector {
    BowVector::from_term_ids(tokenize(&doc.text, opts).iter().filter_map(|t| vocab.id(t)))
}
