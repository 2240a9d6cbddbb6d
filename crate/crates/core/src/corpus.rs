//! Sentence-ordered corpus and training-instance sampling.
//!
//! A corpus is a list of documents, each an ordered run of sentences. Only
//! sentences within one document are adjacent. Sentences whose tokens are
//! all out of vocabulary keep their slot (so they still break adjacency) but
//! never take part in training.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::{Vocabulary, WordId};
use crate::tokenize::tokenize;
use crate::{Error, Result};

/// Global (corpus-wide) sentence index.
pub type SentenceId = usize;

/// Largest supported noise-set size.
pub const MAX_NOISE: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    token_ids: Vec<WordId>,
    word_set: Vec<WordId>,
    counts: Vec<u32>,
    document: usize,
    position: usize,
    // First dropped token of an all-OOV sentence, kept so the sentence can be
    // written back out without turning into a document break.
    oov_marker: Option<String>,
}

impl Sentence {
    fn new(token_ids: Vec<WordId>, document: usize, position: usize) -> Self {
        let mut sorted = token_ids.clone();
        sorted.sort_unstable();
        let mut word_set: Vec<WordId> = Vec::new();
        let mut counts: Vec<u32> = Vec::new();
        for id in sorted {
            if word_set.last() == Some(&id) {
                *counts.last_mut().unwrap() += 1;
            } else {
                word_set.push(id);
                counts.push(1);
            }
        }
        Self { token_ids, word_set, counts, document, position, oov_marker: None }
    }

    /// Builds a standalone sentence (document 0, position 0) from word ids.
    pub fn from_ids(ids: impl IntoIterator<Item = WordId>) -> Self {
        Self::new(ids.into_iter().collect(), 0, 0)
    }

    /// Tokenizes `text` and keeps the in-vocabulary tokens.
    pub fn from_text(text: &str, vocab: &Vocabulary) -> Self {
        Self::from_ids(tokenize(text).iter().filter_map(|t| vocab.id(t)))
    }

    /// In-vocabulary token ids in source order, repeats included.
    pub fn token_ids(&self) -> &[WordId] {
        &self.token_ids
    }

    /// Distinct ids, ascending.
    pub fn word_set(&self) -> &[WordId] {
        &self.word_set
    }

    /// `(id, occurrences)` for each distinct id, ascending by id.
    pub fn word_counts(&self) -> impl Iterator<Item = (WordId, u32)> + '_ {
        self.word_set.iter().copied().zip(self.counts.iter().copied())
    }

    pub fn contains(&self, id: WordId) -> bool {
        self.word_set.binary_search(&id).is_ok()
    }

    pub fn is_trainable(&self) -> bool {
        !self.word_set.is_empty()
    }

    pub fn document(&self) -> usize {
        self.document
    }

    /// Position inside its document.
    pub fn position(&self) -> usize {
        self.position
    }
}

/// A view of one document's sentences.
#[derive(Debug, Clone, Copy)]
pub struct Document<'a> {
    first: SentenceId,
    sentences: &'a [Sentence],
}

impl<'a> Document<'a> {
    pub fn sentences(&self) -> &'a [Sentence] {
        self.sentences
    }

    /// Global id of the document's first sentence.
    pub fn first_id(&self) -> SentenceId {
        self.first
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Ingestion counters, printable as a `key: value` block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub documents: usize,
    pub sentences: usize,
    pub tokens: usize,
    pub oov_tokens: usize,
    pub untrainable_sentences: usize,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lines: {}", self.lines)?;
        writeln!(f, "documents: {}", self.documents)?;
        writeln!(f, "sentences: {}", self.sentences)?;
        writeln!(f, "tokens: {}", self.tokens)?;
        writeln!(f, "oov_dropped: {}", self.oov_tokens)?;
        writeln!(f, "untrainable_sentences: {}", self.untrainable_sentences)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    sentences: Vec<Sentence>,
    documents: Vec<Range<usize>>,
    trainable: Vec<SentenceId>,
    vocab_size: usize,
}

impl Corpus {
    /// Ingests lines: one sentence per line, blank lines end a document.
    pub fn from_lines<'a, I>(lines: I, vocab: &Vocabulary) -> Result<(Self, IngestReport)>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut builder = CorpusBuilder::new(vocab);
        lines.into_iter().for_each(|l| builder.push_line(l));
        builder.finish()
    }

    /// Builds a corpus directly from word-id documents.
    pub fn from_documents(docs: Vec<Vec<Vec<WordId>>>, vocab_size: usize) -> Result<Self> {
        let mut sentences = Vec::new();
        let mut documents = Vec::new();
        for doc in docs.into_iter().filter(|d| !d.is_empty()) {
            let start = sentences.len();
            for (p, ids) in doc.into_iter().enumerate() {
                if let Some(bad) = ids.iter().find(|id| id.index() >= vocab_size) {
                    return Err(Error::WordOutOfRange { id: bad.index(), size: vocab_size });
                }
                sentences.push(Sentence::new(ids, documents.len(), p));
            }
            documents.push(start..sentences.len());
        }
        Self::assemble(sentences, documents, vocab_size)
    }

    fn assemble(
        sentences: Vec<Sentence>,
        documents: Vec<Range<usize>>,
        vocab_size: usize,
    ) -> Result<Self> {
        let trainable: Vec<SentenceId> =
            (0..sentences.len()).filter(|&i| sentences[i].is_trainable()).collect();
        if trainable.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self { sentences, documents, trainable, vocab_size })
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn sentences(&self) -> &[Sentence] {
        &self.sentences
    }

    pub fn sentence(&self, id: SentenceId) -> Result<&Sentence> {
        self.sentences.get(id).ok_or(Error::SentenceOutOfRange(id))
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn documents(&self) -> impl ExactSizeIterator<Item = Document<'_>> + '_ {
        self.documents
            .iter()
            .map(move |r| Document { first: r.start, sentences: &self.sentences[r.clone()] })
    }

    /// Global ids of the sentences with at least one in-vocabulary word.
    pub fn trainable(&self) -> &[SentenceId] {
        &self.trainable
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    /// Whether `a` and `b` are neighbours within one document.
    pub fn adjacent(&self, a: SentenceId, b: SentenceId) -> bool {
        let (sa, sb) = (&self.sentences[a], &self.sentences[b]);
        sa.document == sb.document && sa.position.abs_diff(sb.position) == 1
    }

    /// In-document neighbours of `id`: the previous and next sentence if any.
    pub fn neighbours(&self, id: SentenceId) -> impl Iterator<Item = SentenceId> + '_ {
        let prev = id.checked_sub(1);
        let next = Some(id + 1).filter(|&n| n < self.sentences.len());
        prev.into_iter().chain(next).filter(move |&n| self.adjacent(id, n))
    }

    /// Number of sentences containing each word, indexed by word id.
    pub fn sentence_frequencies(&self) -> Vec<u32> {
        let mut freq = alloc::vec![0u32; self.vocab_size];
        for s in &self.sentences {
            for id in &s.word_set {
                freq[id.index()] += 1;
            }
        }
        freq
    }

    /// Writes the corpus back in its text form: in-vocabulary tokens joined
    /// by spaces, blank lines between documents. Re-ingesting the output with
    /// the same vocabulary reproduces every sentence's token ids.
    pub fn write_text<W: fmt::Write>(&self, vocab: &Vocabulary, out: &mut W) -> fmt::Result {
        for (d, range) in self.documents.iter().enumerate() {
            if d > 0 {
                out.write_char('\n')?;
            }
            for s in &self.sentences[range.clone()] {
                if let Some(marker) = &s.oov_marker {
                    out.write_str(marker)?;
                }
                for (i, id) in s.token_ids.iter().enumerate() {
                    if i > 0 {
                        out.write_char(' ')?;
                    }
                    out.write_str(vocab.word(*id).unwrap_or_default())?;
                }
                out.write_char('\n')?;
            }
        }
        Ok(())
    }
}

/// Streaming corpus ingestion.
pub struct CorpusBuilder<'v> {
    vocab: &'v Vocabulary,
    sentences: Vec<Sentence>,
    documents: Vec<Range<usize>>,
    doc_start: usize,
    report: IngestReport,
}

impl<'v> CorpusBuilder<'v> {
    pub fn new(vocab: &'v Vocabulary) -> Self {
        Self {
            vocab,
            sentences: Vec::new(),
            documents: Vec::new(),
            doc_start: 0,
            report: IngestReport::default(),
        }
    }

    fn close_document(&mut self) {
        if self.sentences.len() > self.doc_start {
            self.documents.push(self.doc_start..self.sentences.len());
            self.doc_start = self.sentences.len();
        }
    }

    pub fn push_line(&mut self, line: &str) {
        self.report.lines += 1;
        if line.trim().is_empty() {
            self.close_document();
            return;
        }
        let tokens = tokenize(line);
        let mut ids = Vec::with_capacity(tokens.len());
        let mut marker = None;
        for t in tokens {
            match self.vocab.id(&t) {
                Some(id) => ids.push(id),
                None => {
                    self.report.oov_tokens += 1;
                    marker.get_or_insert(t);
                }
            }
        }
        self.report.tokens += ids.len();
        let position = self.sentences.len() - self.doc_start;
        let mut sentence = Sentence::new(ids, self.documents.len(), position);
        if !sentence.is_trainable() {
            self.report.untrainable_sentences += 1;
            sentence.oov_marker = marker;
        }
        self.sentences.push(sentence);
    }

    pub fn finish(mut self) -> Result<(Corpus, IngestReport)> {
        self.close_document();
        self.report.documents = self.documents.len();
        self.report.sentences = self.sentences.len();
        let corpus = Corpus::assemble(self.sentences, self.documents, self.vocab.len())?;
        Ok((corpus, self.report))
    }
}

/// One supervised pair plus its sampled normalisation set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingInstance {
    pub anchor: SentenceId,
    pub candidate: SentenceId,
    /// `true` for an adjacent pair (t = 1).
    pub positive: bool,
    pub noise: Vec<SentenceId>,
}

impl TrainingInstance {
    pub fn target(&self) -> f64 {
        if self.positive {
            1.0
        } else {
            0.0
        }
    }
}

/// Draws positive, negative and noise sentences for training epochs.
#[derive(Debug, Clone)]
pub struct InstanceSampler<'c> {
    corpus: &'c Corpus,
    noise_size: usize,
    negatives_per_anchor: usize,
}

impl<'c> InstanceSampler<'c> {
    /// `noise_size` (K) must be in `1..=10` and the corpus needs at least
    /// `K + 3` trainable sentences.
    pub fn new(corpus: &'c Corpus, noise_size: usize, negatives_per_anchor: usize) -> Result<Self> {
        if !(1..=MAX_NOISE).contains(&noise_size) {
            return Err(Error::InvalidConfig(alloc::format!(
                "noise set size K={noise_size} outside 1..={MAX_NOISE}"
            )));
        }
        let required = noise_size + 3;
        let trainable = corpus.trainable().len();
        if trainable < required {
            return Err(Error::CorpusTooSmall { trainable, required });
        }
        Ok(Self { corpus, noise_size, negatives_per_anchor })
    }

    fn draw_trainable<R: Rng>(&self, rng: &mut R) -> SentenceId {
        let pool = self.corpus.trainable();
        pool[rng.random_range(0..pool.len())]
    }

    /// A uniformly drawn trainable sentence that is neither `anchor` nor one
    /// of its in-document neighbours.
    pub fn sample_negative<R: Rng>(&self, anchor: SentenceId, rng: &mut R) -> SentenceId {
        loop {
            let c = self.draw_trainable(rng);
            if c != anchor && !self.corpus.adjacent(anchor, c) {
                return c;
            }
        }
    }

    /// `K` distinct trainable sentences excluding `anchor` and `candidate`.
    pub fn sample_noise<R: Rng>(
        &self,
        anchor: SentenceId,
        candidate: SentenceId,
        rng: &mut R,
    ) -> Vec<SentenceId> {
        let mut noise = Vec::with_capacity(self.noise_size);
        while noise.len() < self.noise_size {
            let c = self.draw_trainable(rng);
            if c != anchor && c != candidate && !noise.contains(&c) {
                noise.push(c);
            }
        }
        noise
    }

    /// All instances for one pass over the corpus, in a seeded random order.
    ///
    /// Every trainable anchor yields one positive per trainable in-document
    /// neighbour and `negatives_per_anchor` negatives.
    pub fn epoch(&self, seed: u64) -> Vec<TrainingInstance> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for &anchor in self.corpus.trainable() {
            let neighbours = self.corpus.neighbours(anchor);
            for candidate in neighbours {
                if !self.corpus.sentences[candidate].is_trainable() {
                    continue;
                }
                let noise = self.sample_noise(anchor, candidate, &mut rng);
                out.push(TrainingInstance { anchor, candidate, positive: true, noise });
            }
            for _ in 0..self.negatives_per_anchor {
                let candidate = self.sample_negative(anchor, &mut rng);
                let noise = self.sample_noise(anchor, candidate, &mut rng);
                out.push(TrainingInstance { anchor, candidate, positive: false, noise });
            }
        }
        out.shuffle(&mut rng);
        out
    }
}
