//! Vocabulary and fixed pre-trained word vectors.
//!
//! Vectors come from the usual text layout: one word per line followed by
//! its `d` whitespace-separated components. The loader here is fed lines and
//! does no IO itself.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Dense index of a word in a [`Vocabulary`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WordId(pub u32);

impl WordId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for WordId {
    fn from(i: usize) -> Self {
        WordId(i as u32)
    }
}

impl fmt::Display for WordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Bidirectional word / id mapping with dense ids `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: BTreeMap<String, WordId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary in iteration order. Duplicates are an error.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::new();
        for w in words {
            let w = w.into();
            if vocab.id(&w).is_some() {
                return Err(Error::DuplicateWord(w));
            }
            vocab.insert(w);
        }
        Ok(vocab)
    }

    /// Returns the id of `word`, adding it if absent.
    pub fn insert(&mut self, word: String) -> WordId {
        if let Some(&id) = self.index.get(&word) {
            return id;
        }
        let id = WordId::from(self.words.len());
        self.index.insert(word.clone(), id);
        self.words.push(word);
        id
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> Option<&str> {
        self.words.get(id.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words in id order.
    pub fn words(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.words.iter().map(String::as_str)
    }
}

/// `V x d` matrix of word vectors, row `i` belonging to `WordId(i)`.
///
/// Training only ever reads from this table.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingTable {
    /// Builds a table from row-major data. Every entry must be finite.
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dimension must be positive".to_string()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: data.len() % dim });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("embedding contains non-finite values".to_string()));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn row(&self, id: WordId) -> &[f64] {
        let start = id.index() * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Looks up `word` verbatim (no case folding).
    pub fn vector_of<'a>(&'a self, vocab: &Vocabulary, word: &str) -> Option<&'a [f64]> {
        vocab.id(word).map(|id| self.row(id))
    }
}

/// Counters collected while loading an embedding file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub loaded: usize,
    pub blank: usize,
    pub header_skipped: bool,
    pub duplicates: usize,
    pub malformed: usize,
    pub non_finite: usize,
}

impl LoadReport {
    /// Lines that were neither loaded, blank, nor a header.
    pub fn skipped(&self) -> usize {
        self.duplicates + self.malformed + self.non_finite
    }
}

enum ParsedLine<'a> {
    Vector(&'a str, Vec<f64>),
    NonFinite,
    Malformed,
}

fn parse_line(line: &str) -> ParsedLine<'_> {
    let mut fields = line.split_whitespace();
    let Some(word) = fields.next() else {
        return ParsedLine::Malformed;
    };
    let mut values = Vec::new();
    for f in fields {
        match f.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) => return ParsedLine::Malformed,
        }
    }
    if values.is_empty() {
        ParsedLine::Malformed
    } else if values.iter().any(|v| !v.is_finite()) {
        ParsedLine::NonFinite
    } else {
        ParsedLine::Vector(word, values)
    }
}

/// A leading `<count> <dim>` line as written by word2vec-style tools.
fn is_count_header(line: &str) -> bool {
    let fields: Vec<&str> = line.split_whitespace().collect();
    fields.len() == 2 && fields.iter().all(|f| f.parse::<u64>().is_ok())
}

/// Incremental parser for the word-vector text format.
///
/// The dimension is taken from the first valid line. Later lines with a
/// different number of components, unparsable numbers or non-finite values
/// are skipped and counted, as are repeated words (the first one wins).
#[derive(Debug, Default)]
pub struct EmbeddingLoader {
    vocab: Vocabulary,
    data: Vec<f64>,
    dim: Option<usize>,
    seen_content: bool,
    report: LoadReport,
}

impl EmbeddingLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_line(&mut self, line: &str) {
        self.report.lines += 1;
        if line.trim().is_empty() {
            self.report.blank += 1;
            return;
        }
        let first = !self.seen_content;
        self.seen_content = true;
        if first && is_count_header(line) {
            self.report.header_skipped = true;
            return;
        }
        match parse_line(line) {
            ParsedLine::Malformed => self.report.malformed += 1,
            ParsedLine::NonFinite => self.report.non_finite += 1,
            ParsedLine::Vector(word, values) => {
                let dim = *self.dim.get_or_insert(values.len());
                if values.len() != dim {
                    self.report.malformed += 1;
                } else if self.vocab.id(word).is_some() {
                    self.report.duplicates += 1;
                } else {
                    self.vocab.insert(word.to_string());
                    self.data.extend_from_slice(&values);
                    self.report.loaded += 1;
                }
            }
        }
    }

    pub fn finish(self) -> Result<(Vocabulary, EmbeddingTable, LoadReport)> {
        let dim = self.dim.ok_or(Error::NoEmbeddings)?;
        if self.vocab.is_empty() {
            return Err(Error::NoEmbeddings);
        }
        let table = EmbeddingTable { dim, data: self.data };
        Ok((self.vocab, table, self.report))
    }

    /// Parses a whole in-memory text.
    pub fn parse_str(text: &str) -> Result<(Vocabulary, EmbeddingTable, LoadReport)> {
        let mut loader = Self::new();
        text.lines().for_each(|l| loader.push_line(l));
        loader.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn two_line_file() {
        let (vocab, table, report) = EmbeddingLoader::parse_str("a 1.0 0.0\nb 0.0 1.0\n").unwrap();
        assert_eq!(vocab.len(), 2);
        assert_eq!(table.dim(), 2);
        assert_eq!(table.vector_of(&vocab, "a"), Some(&[1.0, 0.0][..]));
        assert_eq!(report.loaded, 2);
    }

    #[test]
    fn one_malformed_among_hundred() {
        let mut text = String::new();
        for i in 0..100 {
            if i == 37 {
                text.push_str("w37 1.0 2.0\n");
            } else {
                text.push_str(&format!("w{i} {i}.0 0.5 -1e-3\n"));
            }
        }
        let (vocab, table, report) = EmbeddingLoader::parse_str(&text).unwrap();
        assert_eq!(vocab.len(), 99);
        assert_eq!(table.rows(), 99);
        assert_eq!(report.skipped(), 1);
        assert_eq!(report.malformed, 1);
    }

    #[test]
    fn duplicates_keep_first() {
        let (vocab, table, report) = EmbeddingLoader::parse_str("a 1 2\na 3 4\nb 5 6").unwrap();
        assert_eq!(vocab.len(), 2);
        assert_eq!(table.vector_of(&vocab, "a"), Some(&[1.0, 2.0][..]));
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn non_finite_and_garbage_lines_are_counted() {
        let text = "x 1 nan\ny 1 inf\nz 1 abc\nonlyword\nw 0.5 0.25\n";
        let (vocab, _, report) = EmbeddingLoader::parse_str(text).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(report.non_finite, 2);
        assert_eq!(report.malformed, 2);
    }

    #[test]
    fn word2vec_header_is_skipped() {
        let (vocab, table, report) = EmbeddingLoader::parse_str("2 3\na 1 2 3\nb 4 5 6\n").unwrap();
        assert!(report.header_skipped);
        assert_eq!(vocab.len(), 2);
        assert_eq!(table.dim(), 3);
    }

    #[test]
    fn no_valid_lines_is_an_error() {
        assert_eq!(EmbeddingLoader::parse_str("").unwrap_err(), Error::NoEmbeddings);
        assert_eq!(EmbeddingLoader::parse_str("a\nb c\n").unwrap_err(), Error::NoEmbeddings);
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let (vocab, table, _) = EmbeddingLoader::parse_str("abe 1 2\n").unwrap();
        assert!(table.vector_of(&vocab, "Abe").is_none());
        assert!(table.vector_of(&vocab, "abe").is_some());
        assert!(table.vector_of(&vocab, "zzz").is_none());
    }

    #[test]
    fn vocabulary_is_a_bijection() {
        let vocab = Vocabulary::from_words(["x", "y", "z"]).unwrap();
        for (i, w) in vocab.words().enumerate() {
            assert_eq!(vocab.id(w), Some(WordId::from(i)));
            assert_eq!(vocab.word(WordId::from(i)), Some(w));
        }
        assert!(Vocabulary::from_words(["x", "x"]).is_err());
    }
}
