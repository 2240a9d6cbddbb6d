//! Non-learned weighting schemes: plain averaging and inverse sentence
//! frequency, plus the common [`WeightingScheme`] wrapper used at evaluation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::Sentence;
use crate::embeddings::EmbeddingTable;
use crate::salience::{embed_sentence, SalienceTable, Semantics};
use crate::{Error, Result};

/// `ISF(w) = ln(1 + total / contains(w))`.
///
/// Words that occur in no sentence get `ln(1 + total)`, the largest value
/// any observed word can reach.
pub fn isf_scores(sentence_freqs: &[u32], total_sentences: usize) -> Result<Vec<f64>> {
    if total_sentences == 0 {
        return Err(Error::EmptyCorpus);
    }
    let total = total_sentences as f64;
    Ok(sentence_freqs
        .iter()
        .map(|&c| libm::log(1.0 + total / f64::from(c.max(1))))
        .collect())
}

/// Arithmetic mean of the sentence's word vectors.
pub fn avg_embed(sentence: &Sentence, table: &EmbeddingTable, semantics: Semantics) -> Result<Vec<f64>> {
    let n = semantics.size(sentence);
    if n == 0 {
        return Err(Error::UnembeddableSentence);
    }
    let weights = vec![1.0 / n as f64; table.rows()];
    embed_sentence(sentence, &weights, table, semantics)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Nws,
    Avg,
    Isf,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Nws => "NWS",
            SchemeKind::Avg => "AVG",
            SchemeKind::Isf => "ISF",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nws" => Ok(SchemeKind::Nws),
            "avg" => Ok(SchemeKind::Avg),
            "isf" => Ok(SchemeKind::Isf),
            other => Err(Error::InvalidConfig(alloc::format!("unknown scheme {other:?}"))),
        }
    }
}

/// Per-word weights for building sentence embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightingScheme {
    pub kind: SchemeKind,
    /// One weight per vocabulary word. Unused (all ones) for AVG.
    pub scores: Vec<f64>,
}

impl WeightingScheme {
    pub fn nws(salience: &SalienceTable) -> Self {
        Self { kind: SchemeKind::Nws, scores: salience.scores().to_vec() }
    }

    pub fn avg(vocab_size: usize) -> Self {
        Self { kind: SchemeKind::Avg, scores: vec![1.0; vocab_size] }
    }

    pub fn isf(sentence_freqs: &[u32], total_sentences: usize) -> Result<Self> {
        Ok(Self { kind: SchemeKind::Isf, scores: isf_scores(sentence_freqs, total_sentences)? })
    }

    pub fn embed(&self, sentence: &Sentence, table: &EmbeddingTable, semantics: Semantics) -> Result<Vec<f64>> {
        match self.kind {
            SchemeKind::Avg => avg_embed(sentence, table, semantics),
            SchemeKind::Nws | SchemeKind::Isf => embed_sentence(sentence, &self.scores, table, semantics),
        }
    }
}
