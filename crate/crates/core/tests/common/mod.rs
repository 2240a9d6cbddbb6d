#![allow(dead_code)]

use nws_core::{Corpus, EmbeddingTable, WordId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random unit vectors, one per row.
pub fn unit_vectors(rows: usize, dim: usize, rng: &mut impl Rng) -> EmbeddingTable {
    let mut data = Vec::with_capacity(rows * dim);
    for _ in 0..rows {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        data.extend(v.iter().map(|x| x / n));
    }
    EmbeddingTable::from_rows(dim, data).unwrap()
}

/// Topic corpus: every sentence of a document repeats the document's topic
/// words and adds fillers drawn from a shared pool.
pub struct TopicCorpus {
    pub corpus: Corpus,
    pub table: EmbeddingTable,
    pub topic_words: Vec<WordId>,
    pub filler_words: Vec<WordId>,
}

pub const TOPIC_POOL: usize = 300;
pub const FILLER_POOL: usize = 60;
pub const FILLERS_PER_SENTENCE: usize = 4;

pub fn topic_corpus(seed: u64) -> TopicCorpus {
    topic_corpus_with(seed, TOPIC_POOL, FILLER_POOL, FILLERS_PER_SENTENCE)
}

pub fn topic_corpus_with(seed: u64, topic_pool: usize, filler_pool: usize, fillers: usize) -> TopicCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topic_words: Vec<WordId> = (0..topic_pool).map(WordId::from).collect();
    let filler_words: Vec<WordId> = (topic_pool..topic_pool + filler_pool).map(WordId::from).collect();
    let mut docs = Vec::new();
    for _ in 0..200 {
        let mut topics = Vec::new();
        while topics.len() < 3 {
            let t = topic_words[rng.random_range(0..topic_pool)];
            if !topics.contains(&t) {
                topics.push(t);
            }
        }
        let doc = (0..6)
            .map(|_| {
                let mut s = topics.clone();
                for _ in 0..fillers {
                    s.push(filler_words[rng.random_range(0..filler_pool)]);
                }
                s
            })
            .collect();
        docs.push(doc);
    }
    let vocab_size = topic_pool + filler_pool;
    let corpus = Corpus::from_documents(docs, vocab_size).unwrap();
    let table = unit_vectors(vocab_size, 20, &mut rng);
    TopicCorpus { corpus, table, topic_words, filler_words }
}

pub fn mean_score(scores: &[f64], words: &[WordId]) -> f64 {
    words.iter().map(|w| scores[w.index()]).sum::<f64>() / words.len() as f64
}
