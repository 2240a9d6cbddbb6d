//! Neural word salience.
//!
//! Learns one scalar weight per vocabulary word from a sentence-ordered
//! corpus. Sentences are embedded as the salience-weighted sum of fixed
//! pre-trained word vectors; the weights are trained so that adjacent
//! sentences score higher under a sampled softmax than random ones.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, IO and the command
//! line live in the companion `nws` crate.
//!
//! ```
//! use nws_core::{tokenize, Vocabulary};
//!
//! let vocab = Vocabulary::from_words(["abe", "visited", "washington", "."]).unwrap();
//! let tokens = tokenize("Abe visited Washington.");
//! assert_eq!(tokens, ["abe", "visited", "washington", "."]);
//! assert!(tokens.iter().all(|t| vocab.id(t).is_some()));
//! ```
#![no_std]

extern crate alloc;

pub mod baselines;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod eval;
mod math;
pub mod salience;
pub mod stats;
pub mod tokenize;

pub use baselines::{avg_embed, isf_scores, SchemeKind, WeightingScheme};
pub use corpus::{
    Corpus, CorpusBuilder, Document, IngestReport, InstanceSampler, Sentence, SentenceId,
    TrainingInstance,
};
pub use embeddings::{EmbeddingLoader, EmbeddingTable, LoadReport, Vocabulary, WordId};
pub use error::{Error, Result};
pub use eval::{evaluate_sts, psych_correlation, Dimension, PsychRating, StsPair};
pub use salience::{
    apply_adagrad, embed_sentence, init_salience, instance_gradient, instance_loss,
    softmax_similarity, train, EpochStats, Semantics, SalienceTable, Similarity, SparseGrad,
    TrainConfig, Trainer,
};
pub use stats::{cosine, fisher_ci, fisher_transform, pearson, significance, CorrelationReport};
pub use tokenize::tokenize;
