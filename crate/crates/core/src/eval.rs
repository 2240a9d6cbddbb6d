//! Extrinsic evaluation: sentence-similarity correlation against gold
//! ratings, and correlation of word scores with psycholinguistic norms.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::baselines::WeightingScheme;
use crate::corpus::Sentence;
use crate::embeddings::{EmbeddingTable, Vocabulary};
use crate::salience::Semantics;
use crate::stats::{cosine, Cosine, CorrelationReport};
use crate::{Error, Result};

/// A sentence pair with a human similarity rating.
#[derive(Debug, Clone, PartialEq)]
pub struct StsPair {
    pub sentence_a: String,
    pub sentence_b: String,
    pub gold: f64,
}

impl StsPair {
    pub fn new(a: impl Into<String>, b: impl Into<String>, gold: f64) -> Self {
        Self { sentence_a: a.into(), sentence_b: b.into(), gold }
    }
}

/// Cosine between the two sentence embeddings, or `None` when either
/// sentence has no in-vocabulary word.
pub fn score_pair(
    pair: &StsPair,
    scheme: &WeightingScheme,
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    semantics: Semantics,
) -> Option<Cosine> {
    let a = Sentence::from_text(&pair.sentence_a, vocab);
    let b = Sentence::from_text(&pair.sentence_b, vocab);
    let ea = scheme.embed(&a, table, semantics).ok()?;
    let eb = scheme.embed(&b, table, semantics).ok()?;
    Some(cosine(&ea, &eb))
}

/// Correlates per-pair scores (in pair order) with the gold ratings,
/// skipping unscorable pairs.
pub fn report_from_scores(pairs: &[StsPair], scores: &[Option<Cosine>]) -> Result<CorrelationReport> {
    if pairs.len() != scores.len() {
        return Err(Error::LengthMismatch(pairs.len(), scores.len()));
    }
    let mut system = Vec::with_capacity(pairs.len());
    let mut gold = Vec::with_capacity(pairs.len());
    let mut degenerate = 0;
    for (pair, score) in pairs.iter().zip(scores) {
        if let Some(c) = score {
            system.push(c.value);
            gold.push(pair.gold);
            degenerate += usize::from(c.degenerate);
        }
    }
    if system.len() < 3 {
        return Err(Error::TooFewObservations { required: 3, got: system.len() });
    }
    let mut report = CorrelationReport::from_samples(&system, &gold)?;
    report.skipped_pairs = pairs.len() - system.len();
    report.degenerate = degenerate;
    Ok(report)
}

/// Tokenizes and embeds every pair under `scheme`, scores it by cosine and
/// correlates the scores with the gold ratings.
pub fn evaluate_sts(
    pairs: &[StsPair],
    scheme: &WeightingScheme,
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    semantics: Semantics,
) -> Result<CorrelationReport> {
    let scores: Vec<Option<Cosine>> =
        pairs.iter().map(|p| score_pair(p, scheme, table, vocab, semantics)).collect();
    report_from_scores(pairs, &scores)
}

/// Psycholinguistic rating dimensions, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dimension {
    Arousal,
    Concreteness,
    Dominance,
    Imageability,
    Valence,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Arousal,
        Dimension::Concreteness,
        Dimension::Dominance,
        Dimension::Imageability,
        Dimension::Valence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Arousal => "arousal",
            Dimension::Concreteness => "concreteness",
            Dimension::Dominance => "dominance",
            Dimension::Imageability => "imageability",
            Dimension::Valence => "valence",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown rating dimension {s:?}")))
    }
}

/// Ratings for one word; any dimension may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct PsychRating {
    pub word: String,
    values: [Option<f64>; 5],
}

impl PsychRating {
    pub fn new(word: impl Into<String>) -> Self {
        Self { word: word.into(), values: [None; 5] }
    }

    pub fn with(mut self, dim: Dimension, value: f64) -> Self {
        self.set(dim, Some(value));
        self
    }

    pub fn set(&mut self, dim: Dimension, value: Option<f64>) {
        self.values[dim.slot()] = value.filter(|v| v.is_finite());
    }

    pub fn get(&self, dim: Dimension) -> Option<f64> {
        self.values[dim.slot()]
    }

    pub fn has_any(&self) -> bool {
        self.values.iter().any(Option::is_some)
    }
}

/// Pearson correlation between word scores and each rating dimension, over
/// the words that have both. Each dimension succeeds or fails on its own.
pub fn psych_correlation<F>(score_of: F, ratings: &[PsychRating]) -> Vec<(Dimension, Result<CorrelationReport>)>
where
    F: Fn(&str) -> Option<f64>,
{
    Dimension::ALL
        .into_iter()
        .map(|dim| {
            let (scores, values): (Vec<f64>, Vec<f64>) = ratings
                .iter()
                .filter_map(|r| Some((score_of(&r.word)?, r.get(dim)?)))
                .unzip();
            let report = if scores.len() < 3 {
                Err(Error::IntersectionTooSmall(scores.len()))
            } else {
                CorrelationReport::from_samples(&scores, &values)
            };
            (dim, report)
        })
        .collect()
}
