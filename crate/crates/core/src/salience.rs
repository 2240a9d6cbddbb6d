//! The salience learner.
//!
//! A sentence is embedded as `s = sum_w q(w) * vec(w)`. For an instance with
//! anchor `i`, candidate `j` and noise set `N`, the similarity is the softmax
//! weight of `j` among `{j} ∪ N` under inner products with `s_i`:
//!
//! ```text
//! h = exp(s_i·s_j) / (exp(s_i·s_j) + sum_{k in N} exp(s_i·s_k))
//! L = -[t ln h + (1 - t) ln(1 - h)]
//! ```
//!
//! Gradients with respect to `q` are exact and sparse; updates use AdaGrad
//! one instance at a time.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, InstanceSampler, Sentence, TrainingInstance, MAX_NOISE};
use crate::embeddings::{EmbeddingTable, WordId};
use crate::math::{dot, log_sum_exp};
use crate::{Error, Result};

/// How repeated words inside one sentence are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Semantics {
    /// Each distinct word counts once.
    #[default]
    Set,
    /// Each occurrence counts.
    Multiset,
}

impl Semantics {
    #[inline]
    pub(crate) fn multiplicity(self, count: u32) -> f64 {
        match self {
            Semantics::Set => 1.0,
            Semantics::Multiset => f64::from(count),
        }
    }

    /// Sum of multiplicities: distinct words or tokens.
    pub fn size(self, sentence: &Sentence) -> usize {
        match self {
            Semantics::Set => sentence.word_set().len(),
            Semantics::Multiset => sentence.token_ids().len(),
        }
    }
}

/// Learnable per-word scores with their AdaGrad accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct SalienceTable {
    q: Vec<f64>,
    acc: Vec<f64>,
    epoch_count: u32,
}

impl SalienceTable {
    /// Scores with zeroed accumulators.
    pub fn new(q: Vec<f64>) -> Self {
        let acc = vec![0.0; q.len()];
        Self { q, acc, epoch_count: 0 }
    }

    /// Restores a table, e.g. from a checkpoint.
    pub fn from_parts(q: Vec<f64>, acc: Vec<f64>, epoch_count: u32) -> Result<Self> {
        if q.len() != acc.len() {
            return Err(Error::LengthMismatch(q.len(), acc.len()));
        }
        if q.iter().any(|v| !v.is_finite()) || acc.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidConfig("salience table contains invalid values".into()));
        }
        Ok(Self { q, acc, epoch_count })
    }

    pub fn scores(&self) -> &[f64] {
        &self.q
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.acc
    }

    pub fn score(&self, id: WordId) -> f64 {
        self.q[id.index()]
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Completed training epochs.
    pub fn epoch_count(&self) -> u32 {
        self.epoch_count
    }
}

/// Random scores, independently uniform on `[0, 1)`.
pub fn init_salience(vocab_size: usize, seed: u64) -> Result<SalienceTable> {
    if vocab_size == 0 {
        return Err(Error::InvalidConfig("vocabulary is empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Instance sampling uses stream 0 of the same seed.
    rng.set_stream(1);
    let q = (0..vocab_size).map(|_| rng.random::<f64>()).collect();
    Ok(SalienceTable::new(q))
}

/// `sum_w m(w) * weights[w] * vec(w)` over the sentence's words, where `m`
/// is 1 or the occurrence count depending on `semantics`.
pub fn embed_sentence(
    sentence: &Sentence,
    weights: &[f64],
    table: &EmbeddingTable,
    semantics: Semantics,
) -> Result<Vec<f64>> {
    if !sentence.is_trainable() {
        return Err(Error::UnembeddableSentence);
    }
    let mut out = vec![0.0; table.dim()];
    for (id, count) in sentence.word_counts() {
        let weight = semantics.multiplicity(count) * weights[id.index()];
        for (o, x) in out.iter_mut().zip(table.row(id)) {
            *o += weight * x;
        }
    }
    Ok(out)
}

/// Result of the sampled softmax. `weights[0]` belongs to the candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    pub h: f64,
    pub log_h: f64,
    /// `ln(1 - h)`, computed without cancellation.
    pub log_one_minus_h: f64,
    pub weights: Vec<f64>,
}

/// Softmax weight of `candidate` among `candidate` and `noise`, scored by
/// inner product with `anchor`.
pub fn softmax_similarity<V: AsRef<[f64]>>(
    anchor: &[f64],
    candidate: &[f64],
    noise: &[V],
) -> Similarity {
    let mut logits = Vec::with_capacity(noise.len() + 1);
    logits.push(dot(anchor, candidate));
    logits.extend(noise.iter().map(|n| dot(anchor, n.as_ref())));
    similarity_from_logits(&logits)
}

fn similarity_from_logits(logits: &[f64]) -> Similarity {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| libm::exp(z - max)).collect();
    let total: f64 = exps.iter().sum();
    let weights: Vec<f64> = exps.iter().map(|e| e / total).collect();
    let lse = log_sum_exp(logits);
    Similarity {
        h: weights[0],
        log_h: logits[0] - lse,
        log_one_minus_h: log_sum_exp(&logits[1..]) - lse,
        weights,
    }
}

/// Sparse gradient: `(word, dL/dq(word))`, ascending by word id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseGrad(Vec<(WordId, f64)>);

impl SparseGrad {
    pub fn get(&self, id: WordId) -> Option<f64> {
        self.0.binary_search_by_key(&id, |e| e.0).ok().map(|i| self.0[i].1)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (WordId, f64)> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(WordId, f64)> for SparseGrad {
    fn from_iter<I: IntoIterator<Item = (WordId, f64)>>(iter: I) -> Self {
        let merged: BTreeMap<WordId, f64> = iter.into_iter().fold(BTreeMap::new(), |mut m, (k, v)| {
            *m.entry(k).or_insert(0.0) += v;
            m
        });
        SparseGrad(merged.into_iter().collect())
    }
}

/// Embeddings and softmax for one instance under the current scores.
struct Forward<'a> {
    anchor: &'a Sentence,
    // Candidate first, then the noise sentences.
    others: Vec<&'a Sentence>,
    s_anchor: Vec<f64>,
    s_others: Vec<Vec<f64>>,
    sim: Similarity,
}

fn forward<'a>(
    instance: &TrainingInstance,
    corpus: &'a Corpus,
    weights: &[f64],
    table: &EmbeddingTable,
    semantics: Semantics,
) -> Result<Forward<'a>> {
    let fetch = |id: usize| -> Result<&'a Sentence> {
        let s = corpus.sentence(id)?;
        if s.is_trainable() {
            Ok(s)
        } else {
            Err(Error::UntrainableSentence(id))
        }
    };
    let anchor = fetch(instance.anchor)?;
    let others = core::iter::once(instance.candidate)
        .chain(instance.noise.iter().copied())
        .map(fetch)
        .collect::<Result<Vec<_>>>()?;
    let s_anchor = embed_sentence(anchor, weights, table, semantics)?;
    let s_others = others
        .iter()
        .map(|s| embed_sentence(s, weights, table, semantics))
        .collect::<Result<Vec<_>>>()?;
    let logits: Vec<f64> = s_others.iter().map(|s| dot(&s_anchor, s)).collect();
    let sim = similarity_from_logits(&logits);
    Ok(Forward { anchor, others, s_anchor, s_others, sim })
}

impl Forward<'_> {
    fn loss(&self, positive: bool) -> f64 {
        if positive {
            -self.sim.log_h
        } else {
            -self.sim.log_one_minus_h
        }
    }
}

/// Cross-entropy of one instance; always `>= 0`.
pub fn instance_loss(
    instance: &TrainingInstance,
    corpus: &Corpus,
    salience: &SalienceTable,
    table: &EmbeddingTable,
    semantics: Semantics,
) -> Result<f64> {
    Ok(forward(instance, corpus, salience.scores(), table, semantics)?.loss(instance.positive))
}

fn gradient_of(fw: &Forward<'_>, positive: bool, table: &EmbeddingTable, semantics: Semantics) -> SparseGrad {
    // dL/dh * dh/dg = (h - t) / (1 - h)
    let coef = if positive {
        -1.0
    } else {
        libm::exp(fw.sim.log_h - fw.sim.log_one_minus_h)
    };
    let dim = table.dim();
    // Softmax-expected partner embedding.
    let mut expected = vec![0.0; dim];
    for (p, s) in fw.sim.weights.iter().zip(&fw.s_others) {
        for (e, x) in expected.iter_mut().zip(s) {
            *e += p * x;
        }
    }
    let anchor_delta: Vec<f64> = fw.s_others[0].iter().zip(&expected).map(|(a, b)| a - b).collect();

    // For each word: multiplicity in the anchor, and in the candidate minus
    // the softmax-weighted multiplicity over candidate and noise.
    let mut mult: BTreeMap<WordId, (f64, f64)> = BTreeMap::new();
    for (id, c) in fw.anchor.word_counts() {
        mult.entry(id).or_default().0 += semantics.multiplicity(c);
    }
    for (k, (sentence, p)) in fw.others.iter().zip(&fw.sim.weights).enumerate() {
        let indicator = if k == 0 { 1.0 } else { 0.0 };
        for (id, c) in sentence.word_counts() {
            mult.entry(id).or_default().1 += (indicator - p) * semantics.multiplicity(c);
        }
    }
    mult.into_iter()
        .map(|(id, (in_anchor, in_partners))| {
            let w = table.row(id);
            let mut dg = 0.0;
            if in_anchor != 0.0 {
                dg += in_anchor * dot(w, &anchor_delta);
            }
            if in_partners != 0.0 {
                dg += in_partners * dot(w, &fw.s_anchor);
            }
            (id, coef * dg)
        })
        .collect()
}

/// Exact `dL/dq(w)` for every word occurring in the instance's sentences.
pub fn instance_gradient(
    instance: &TrainingInstance,
    corpus: &Corpus,
    salience: &SalienceTable,
    table: &EmbeddingTable,
    semantics: Semantics,
) -> Result<SparseGrad> {
    let fw = forward(instance, corpus, salience.scores(), table, semantics)?;
    Ok(gradient_of(&fw, instance.positive, table, semantics))
}

/// Training hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Noise-set size K.
    pub noise_size: usize,
    pub negatives_per_anchor: usize,
    pub epochs: u32,
    pub learning_rate: f64,
    pub seed: u64,
    pub adagrad_epsilon: f64,
    pub semantics: Semantics,
    /// Per-coordinate gradient clipping; off by default.
    pub clip: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            noise_size: 5,
            negatives_per_anchor: 1,
            epochs: 5,
            learning_rate: 0.01,
            seed: 0,
            adagrad_epsilon: 1e-8,
            semantics: Semantics::Set,
            clip: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if !(1..=MAX_NOISE).contains(&self.noise_size) {
            return bad(format!("K={} outside 1..={MAX_NOISE}", self.noise_size));
        }
        if self.epochs < 1 {
            return bad(format!("epochs={} must be at least 1", self.epochs));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate {} must be positive", self.learning_rate));
        }
        if !(self.adagrad_epsilon > 0.0 && self.adagrad_epsilon.is_finite()) {
            return bad(format!("epsilon {} must be positive", self.adagrad_epsilon));
        }
        if let Some(c) = self.clip {
            if c.is_nan() || c <= 0.0 {
                return bad(format!("clip {c} must be positive"));
            }
        }
        Ok(())
    }
}

/// One AdaGrad step on the coordinates present in `grad`:
/// `acc += g^2; q -= lr * g / (sqrt(acc) + eps)`.
pub fn apply_adagrad(salience: &mut SalienceTable, grad: &SparseGrad, config: &TrainConfig) {
    for (id, g) in grad.iter() {
        let g = match config.clip {
            Some(c) => g.clamp(-c, c),
            None => g,
        };
        let i = id.index();
        salience.acc[i] += g * g;
        salience.q[i] -= config.learning_rate * g / (libm::sqrt(salience.acc[i]) + config.adagrad_epsilon);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// One-based epoch number.
    pub epoch: u32,
    pub mean_loss: f64,
    pub instances: usize,
}

/// Epoch-driven stochastic training over a fixed corpus and embedding table.
pub struct Trainer<'a> {
    corpus: &'a Corpus,
    table: &'a EmbeddingTable,
    config: TrainConfig,
    sampler: InstanceSampler<'a>,
}

impl<'a> Trainer<'a> {
    pub fn new(corpus: &'a Corpus, table: &'a EmbeddingTable, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        if table.rows() != corpus.vocab_size() {
            return Err(Error::DimensionMismatch { expected: corpus.vocab_size(), got: table.rows() });
        }
        let sampler = InstanceSampler::new(corpus, config.noise_size, config.negatives_per_anchor)?;
        Ok(Self { corpus, table, config, sampler })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Freshly initialised scores for this configuration.
    pub fn init(&self) -> Result<SalienceTable> {
        init_salience(self.corpus.vocab_size(), self.config.seed)
    }

    /// Runs the next epoch (number `salience.epoch_count() + 1`).
    pub fn run_epoch(&self, salience: &mut SalienceTable) -> Result<EpochStats> {
        if salience.len() != self.corpus.vocab_size() {
            return Err(Error::LengthMismatch(salience.len(), self.corpus.vocab_size()));
        }
        let index = salience.epoch_count;
        let instances = self.sampler.epoch(self.config.seed.wrapping_add(u64::from(index)));
        let mut total = 0.0;
        for instance in &instances {
            let fw = forward(instance, self.corpus, &salience.q, self.table, self.config.semantics)?;
            total += fw.loss(instance.positive);
            let grad = gradient_of(&fw, instance.positive, self.table, self.config.semantics);
            apply_adagrad(salience, &grad, &self.config);
        }
        let mean_loss = total / instances.len().max(1) as f64;
        let epoch = index + 1;
        if !mean_loss.is_finite() || salience.q.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch, loss: mean_loss });
        }
        salience.epoch_count = epoch;
        Ok(EpochStats { epoch, mean_loss, instances: instances.len() })
    }

    /// Trains until `config.epochs` epochs are complete, calling `on_epoch`
    /// after each one. A partially trained table resumes where it stopped.
    pub fn run<F>(&self, salience: &mut SalienceTable, mut on_epoch: F) -> Result<()>
    where
        F: FnMut(&EpochStats, &SalienceTable),
    {
        while salience.epoch_count < self.config.epochs {
            let stats = self.run_epoch(salience)?;
            on_epoch(&stats, salience);
        }
        Ok(())
    }
}

/// Trains scores from a random start; returns the table and per-epoch stats.
pub fn train(
    corpus: &Corpus,
    table: &EmbeddingTable,
    config: &TrainConfig,
) -> Result<(SalienceTable, Vec<EpochStats>)> {
    let trainer = Trainer::new(corpus, table, config.clone())?;
    let mut salience = trainer.init()?;
    let mut history = Vec::new();
    trainer.run(&mut salience, |s, _| history.push(*s))?;
    Ok((salience, history))
}
