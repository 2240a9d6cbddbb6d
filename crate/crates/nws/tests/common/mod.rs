#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn word(i: usize) -> String {
    format!("w{i}")
}

/// Embedding text file with `vocab` random unit vectors of dimension `dim`.
pub fn embeddings_text(vocab: usize, dim: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for i in 0..vocab {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push_str(&word(i));
        for x in v {
            write!(out, " {:.6}", x / n).unwrap();
        }
        out.push('\n');
    }
    out
}

fn random_sentence(rng: &mut impl Rng, vocab: usize) -> String {
    let len = rng.random_range(3..=7);
    (0..len).map(|_| word(rng.random_range(0..vocab))).collect::<Vec<_>>().join(" ")
}

/// `docs` documents of `per_doc` sentences, blank line between documents.
pub fn corpus_text(docs: usize, per_doc: usize, vocab: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for d in 0..docs {
        if d > 0 {
            out.push('\n');
        }
        for _ in 0..per_doc {
            out.push_str(&random_sentence(&mut rng, vocab));
            out.push('\n');
        }
    }
    out
}

/// `pairs` STS lines in the single-TSV layout.
pub fn sts_text(pairs: usize, vocab: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..pairs {
        let a = random_sentence(&mut rng, vocab);
        let b = random_sentence(&mut rng, vocab);
        writeln!(out, "{a}\t{b}\t{:.2}", rng.random_range(0.0..5.0)).unwrap();
    }
    out
}

/// Ratings CSV covering every dimension for the first `words` words.
pub fn ratings_text(words: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("word,arousal,concreteness,dominance,imageability,valence\n");
    for i in 0..words {
        write!(out, "{}", word(i)).unwrap();
        for _ in 0..5 {
            write!(out, ",{:.3}", rng.random_range(1.0..9.0)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn nws(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nws"));
    for a in args {
        cmd.arg(a);
    }
    cmd.env("NWS_THREADS", "1").output().expect("spawn nws")
}

pub fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Standard small workspace: embeddings, corpus, STS dataset and ratings.
pub struct Workspace {
    pub dir: tempfile::TempDir,
    pub embeddings: PathBuf,
    pub corpus: PathBuf,
    pub sts: PathBuf,
    pub ratings: PathBuf,
    pub vocab: usize,
}

impl Workspace {
    pub fn new(vocab: usize, dim: usize, docs: usize, per_doc: usize) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let embeddings = write(dir.path(), "vectors.txt", &embeddings_text(vocab, dim, 11));
        let corpus = write(dir.path(), "corpus.txt", &corpus_text(docs, per_doc, vocab, 12));
        let sts = write(dir.path(), "sts.tsv", &sts_text(40, vocab, 13));
        let ratings = write(dir.path(), "ratings.csv", &ratings_text(vocab, 14));
        Workspace { dir, embeddings, corpus, sts, ratings, vocab }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn train(&self, out: &Path, epochs: u32, extra: &[&str]) -> Output {
        let epochs = epochs.to_string();
        let mut args: Vec<&dyn AsRef<std::ffi::OsStr>> = vec![
            &"train",
            &"--embeddings",
            &self.embeddings,
            &"--corpus",
            &self.corpus,
            &"--out",
            &out,
            &"--epochs",
            &epochs,
        ];
        for e in extra {
            args.push(e);
        }
        nws(&args)
    }
}

/// Score rows of a score file as `(word, score)`.
pub fn score_rows(path: &Path) -> Vec<(String, f64)> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let mut f = l.split('\t');
            (f.next().unwrap().to_string(), f.next().unwrap().parse().unwrap())
        })
        .collect()
}
