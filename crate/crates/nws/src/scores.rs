//! Word-score TSV files (learned salience, ISF, AVG), training checkpoints
//! and loss logs.
//!
//! ```text
//! #nws v1 d=300 V=40000 seed=7
//! #kind=NWS
//! #config k=5 negatives_per_anchor=1 epochs=5 lr=0.01 ...
//! #input embeddings=glove.txt sha256=...
//! the<TAB>0.0123
//! ```
//!
//! Rows are in word-id order. Checkpoints add `#epoch=` and `#loss` lines
//! and a third column holding the AdaGrad accumulator.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nws_core::{EmbeddingTable, SalienceTable, SchemeKind, Vocabulary, WeightingScheme};

use crate::error::{NwsError, Result};
use crate::io::{for_each_line, sha256_file, write_atomic};

/// Checksum of one input file, recorded in output headers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputRecord {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl InputRecord {
    pub fn of(role: &str, path: &Path) -> Result<Self> {
        Ok(Self { role: role.to_string(), path: path.display().to_string(), sha256: sha256_file(path)? })
    }
}

/// Everything an output file records about how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub kind: SchemeKind,
    pub dim: usize,
    pub vocab_size: usize,
    pub seed: u64,
    /// Resolved configuration as ordered `key=value` pairs.
    pub config: Vec<(String, String)>,
    pub inputs: Vec<InputRecord>,
}

impl Provenance {
    pub fn write_header(&self, out: &mut String) {
        writeln!(out, "#nws v1 d={} V={} seed={}", self.dim, self.vocab_size, self.seed).unwrap();
        writeln!(out, "#kind={}", self.kind).unwrap();
        out.push_str("#config");
        for (k, v) in &self.config {
            write!(out, " {k}={v}").unwrap();
        }
        out.push('\n');
        for input in &self.inputs {
            writeln!(out, "#input {}={} sha256={}", input.role, input.path, input.sha256).unwrap();
        }
    }

    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// A parsed score file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFile {
    pub provenance: Provenance,
    pub words: Vec<String>,
    pub scores: Vec<f64>,
    /// Present in checkpoints only.
    pub accumulators: Option<Vec<f64>>,
    pub epoch: Option<u32>,
    pub losses: Vec<(u32, f64)>,
}

fn parse_kv(field: &str) -> Option<(&str, &str)> {
    field.split_once('=')
}

fn parse_header_line(line: &str, path: &Path) -> Result<(usize, usize, u64)> {
    let bad = || NwsError::format(path, 1, "expected header `#nws v1 d=<d> V=<V> seed=<seed>`");
    let mut fields = line.split_whitespace();
    if fields.next() != Some("#nws") || fields.next() != Some("v1") {
        return Err(bad());
    }
    let (mut dim, mut vocab, mut seed) = (None, None, None);
    for f in fields {
        match parse_kv(f) {
            Some(("d", v)) => dim = v.parse().ok(),
            Some(("V", v)) => vocab = v.parse().ok(),
            Some(("seed", v)) => seed = v.parse().ok(),
            _ => {}
        }
    }
    Ok((dim.ok_or_else(bad)?, vocab.ok_or_else(bad)?, seed.ok_or_else(bad)?))
}

impl ScoreFile {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.provenance.write_header(&mut out);
        if let Some(epoch) = self.epoch {
            writeln!(out, "#epoch={epoch}").unwrap();
        }
        for (epoch, loss) in &self.losses {
            writeln!(out, "#loss epoch={epoch} mean={loss}").unwrap();
        }
        for (i, (word, score)) in self.words.iter().zip(&self.scores).enumerate() {
            match &self.accumulators {
                Some(acc) => writeln!(out, "{word}\t{score}\t{}", acc[i]).unwrap(),
                None => writeln!(out, "{word}\t{score}").unwrap(),
            }
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut lineno = 0;
        let mut header = None;
        let mut kind = None;
        let mut config = Vec::new();
        let mut inputs = Vec::new();
        let mut epoch = None;
        let mut losses = Vec::new();
        let mut words = Vec::new();
        let mut scores = Vec::new();
        let mut accs: Vec<f64> = Vec::new();
        let mut error = None;
        for_each_line(path, |line| {
            lineno += 1;
            if error.is_some() {
                return;
            }
            let result = (|| -> Result<()> {
                if lineno == 1 {
                    header = Some(parse_header_line(line, path)?);
                    return Ok(());
                }
                if let Some(meta) = line.strip_prefix('#') {
                    let mut fields = meta.split_whitespace();
                    match fields.next() {
                        Some(f) if f.starts_with("kind=") => {
                            kind = Some(f[5..].parse().map_err(|e: nws_core::Error| {
                                NwsError::format(path, lineno, e.to_string())
                            })?);
                        }
                        Some(f) if f.starts_with("epoch=") => {
                            epoch = Some(f[6..].parse().map_err(|_| NwsError::format(path, lineno, "bad epoch"))?);
                        }
                        Some("config") => {
                            config = fields
                                .filter_map(parse_kv)
                                .map(|(k, v)| (k.to_string(), v.to_string()))
                                .collect();
                        }
                        Some("input") => {
                            let spec: Vec<&str> = fields.collect();
                            if let (Some((role, p)), Some(("sha256", sum))) =
                                (spec.first().and_then(|f| parse_kv(f)), spec.last().and_then(|f| parse_kv(f)))
                            {
                                inputs.push(InputRecord {
                                    role: role.to_string(),
                                    path: p.to_string(),
                                    sha256: sum.to_string(),
                                });
                            }
                        }
                        Some("loss") => {
                            let kv: HashMap<&str, &str> = fields.filter_map(parse_kv).collect();
                            let parsed = kv.get("epoch").and_then(|e| e.parse().ok()).zip(kv.get("mean").and_then(|m| m.parse().ok()));
                            losses.push(parsed.ok_or_else(|| NwsError::format(path, lineno, "bad loss line"))?);
                        }
                        _ => {}
                    }
                    return Ok(());
                }
                let fields: Vec<&str> = line.split('\t').collect();
                let bad = |what: &str| NwsError::format(path, lineno, format!("invalid {what}"));
                let score: f64 = fields.get(1).and_then(|s| s.parse().ok()).filter(|s: &f64| s.is_finite()).ok_or_else(|| bad("score"))?;
                if fields.len() > 3 || fields[0].is_empty() {
                    return Err(bad("row"));
                }
                if let Some(a) = fields.get(2) {
                    accs.push(a.parse().map_err(|_| bad("accumulator"))?);
                }
                words.push(fields[0].to_string());
                scores.push(score);
                Ok(())
            })();
            if let Err(e) = result {
                error = Some(e);
            }
        })?;
        if let Some(e) = error {
            return Err(e);
        }
        let (dim, vocab_size, seed) = header.ok_or_else(|| NwsError::format(path, 1, "empty score file"))?;
        if !accs.is_empty() && accs.len() != words.len() {
            return Err(NwsError::format(path, lineno, "accumulator column present on some rows only"));
        }
        let provenance = Provenance {
            kind: kind.unwrap_or(SchemeKind::Nws),
            dim,
            vocab_size,
            seed,
            config,
            inputs,
        };
        Ok(Self {
            provenance,
            words,
            scores,
            accumulators: (!accs.is_empty()).then_some(accs),
            epoch,
            losses,
        })
    }

    /// The plain score file for a trained (or checkpointed) table.
    pub fn from_salience(provenance: Provenance, vocab: &Vocabulary, salience: &SalienceTable) -> Self {
        Self {
            provenance,
            words: vocab.words().map(str::to_string).collect(),
            scores: salience.scores().to_vec(),
            accumulators: None,
            epoch: None,
            losses: Vec::new(),
        }
    }

    /// Checkpoint form: accumulators, epoch count and loss history included.
    pub fn checkpoint(
        provenance: Provenance,
        vocab: &Vocabulary,
        salience: &SalienceTable,
        losses: &[(u32, f64)],
    ) -> Self {
        Self {
            accumulators: Some(salience.accumulators().to_vec()),
            epoch: Some(salience.epoch_count()),
            losses: losses.to_vec(),
            ..Self::from_salience(provenance, vocab, salience)
        }
    }

    /// Restores a salience table whose rows must match `vocab` exactly.
    pub fn to_salience(&self, vocab: &Vocabulary, path: &Path) -> Result<SalienceTable> {
        if self.words.len() != vocab.len() || !self.words.iter().map(String::as_str).eq(vocab.words()) {
            return Err(NwsError::format(path, 1, "score rows do not match the embedding vocabulary"));
        }
        let acc = self.accumulators.clone().unwrap_or_else(|| vec![0.0; self.scores.len()]);
        SalienceTable::from_parts(self.scores.clone(), acc, self.epoch.unwrap_or(0))
            .map_err(|source| NwsError::Core { path: path.to_path_buf(), source })
    }

    /// Weights aligned to `vocab`; vocabulary words absent from the file get
    /// weight 0 and are counted in the second return value.
    pub fn scheme_for(&self, vocab: &Vocabulary) -> (WeightingScheme, usize) {
        if self.provenance.kind == SchemeKind::Avg {
            return (WeightingScheme::avg(vocab.len()), 0);
        }
        let by_word = self.score_map();
        let mut missing = 0;
        let scores = vocab
            .words()
            .map(|w| {
                by_word.get(w).copied().unwrap_or_else(|| {
                    missing += 1;
                    0.0
                })
            })
            .collect();
        (WeightingScheme { kind: self.provenance.kind, scores }, missing)
    }

    pub fn score_map(&self) -> HashMap<&str, f64> {
        self.words.iter().map(String::as_str).zip(self.scores.iter().copied()).collect()
    }
}

/// Score file for a non-learned scheme over `vocab`.
pub fn scheme_file(provenance: Provenance, vocab: &Vocabulary, scheme: &WeightingScheme) -> ScoreFile {
    ScoreFile {
        provenance,
        words: vocab.words().map(str::to_string).collect(),
        scores: scheme.scores.clone(),
        accumulators: None,
        epoch: None,
        losses: Vec::new(),
    }
}

/// `epoch<TAB>mean_loss` log, preceded by the provenance header.
pub fn render_loss_log(provenance: &Provenance, losses: &[(u32, f64)]) -> String {
    let mut out = String::new();
    provenance.write_header(&mut out);
    out.push_str("#epoch\tmean_loss\n");
    for (epoch, loss) in losses {
        writeln!(out, "{epoch}\t{loss}").unwrap();
    }
    out
}

/// Default sibling paths derived from the score output path.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn check_dim(provenance: &Provenance, table: &EmbeddingTable, path: &Path) -> Result<()> {
    if provenance.kind != SchemeKind::Avg && provenance.dim != table.dim() {
        return Err(NwsError::format(
            path,
            1,
            format!("scores were built for d={}, embeddings have d={}", provenance.dim, table.dim()),
        ));
    }
    Ok(())
}
