//! Text preprocessing: tokenization, stopword removal and Porter stemming.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::Path;

mod porter;

pub use porter::stem;

const ENGLISH_STOPWORDS: &str = include_str!("stopwords_en.txt");

#[derive(Debug, thiserror::Error)]
pub enum TextprepError {
    #[error("cannot read stopword file {path}: {source}")]
    StopwordFile {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// A set of lowercase words removed before stemming.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The built-in English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// Parses the stopword file format: one word per line, `#` lines ignored.
    pub fn parse(contents: &str) -> Self {
        let words = contents
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, TextprepError> {
        let path = path.as_ref();
        let contents = fs::read_to_string(path).map_err(|source| TextprepError::StopwordFile {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::parse(&contents))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(Into::into).collect(),
        }
    }
}

/// Term counts for one document, keyed by stemmed token.
///
/// Keys iterate in lexicographic order, which makes vocabulary id assignment
/// deterministic downstream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
}

impl TokenBag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: impl Into<String>) {
        *self.counts.entry(token.into()).or_insert(0) += 1;
    }

    pub fn count(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    /// Number of distinct terms.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of token occurrences.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> + '_ {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> + '_ {
        self.counts.keys().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for TokenBag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bag = Self::new();
        for t in iter {
            bag.add(t);
        }
        bag
    }
}

/// Splits `text` into lowercase alphanumeric runs, dropping runs shorter
/// than two characters and runs made only of digits.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|run| run.chars().nth(1).is_some())
        .filter(|run| !run.chars().all(char::is_numeric))
        .map(str::to_lowercase)
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| !stoplist.contains(t))
        .collect()
}

/// Full pipeline: tokenize, drop stopwords, stem, count.
pub fn preprocess(text: &str, stoplist: &Stoplist) -> TokenBag {
    remove_stopwords(tokenize(text), stoplist)
        .iter()
        .map(|t| stem(t))
        .collect()
}
