use alloc::string::String;

/// Errors produced by the salience library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("no embeddings: input contained no valid vector lines")]
    NoEmbeddings,
    #[error("empty corpus: no sentence has an in-vocabulary token")]
    EmptyCorpus,
    #[error("corpus too small: {trainable} trainable sentences, need at least {required}")]
    CorpusTooSmall { trainable: usize, required: usize },
    #[error("unembeddable sentence: no in-vocabulary words")]
    UnembeddableSentence,
    #[error("sentence {0} has no in-vocabulary words and cannot be trained on")]
    UntrainableSentence(usize),
    #[error("sentence index {0} out of range")]
    SentenceOutOfRange(usize),
    #[error("word id {id} out of range for vocabulary of size {size}")]
    WordOutOfRange { id: usize, size: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {required} observations, got {got}")]
    TooFewObservations { required: usize, got: usize },
    #[error("zero variance: input series is constant")]
    ZeroVariance,
    #[error("correlation {0} outside the open interval (-1, 1)")]
    CorrelationDomain(f64),
    #[error("intersection too small: {0} shared words")]
    IntersectionTooSmall(usize),
    #[error("non-finite mean loss {loss} in epoch {epoch}")]
    NonFiniteLoss { epoch: u32, loss: f64 },
    #[error("duplicate word {0:?}")]
    DuplicateWord(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
