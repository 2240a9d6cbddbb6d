//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nws_core::eval::{report_from_scores, score_pair};
use nws_core::{
    psych_correlation, significance, Corpus, CorrelationReport, Dimension, EmbeddingTable, SchemeKind, Semantics,
    Sentence, StsPair, TrainConfig, Trainer, Vocabulary, WeightingScheme,
};
use rayon::prelude::*;

use crate::datasets::{read_ratings, read_sts, DatasetSource, StsDataset};
use crate::error::{NwsError, Result};
use crate::io::{load_embedding_file, load_embeddings_cached, read_corpus, write_atomic, Embeddings};
use crate::report::{psych_kv, psych_text, sts_kv, sts_text, PsychRow, StsRow};
use crate::scores::{check_dim, render_loss_log, scheme_file, sibling, InputRecord, Provenance, ScoreFile};

/// Environment variable capping evaluation threads.
pub const THREADS_ENV: &str = "NWS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nws", version, about = "Learn and evaluate neural word salience scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn salience scores from a sentence-ordered corpus.
    Train(TrainArgs),
    /// Correlate sentence similarities with gold STS ratings.
    EvalSts(EvalArgs),
    /// Write inverse-sentence-frequency scores for a corpus.
    Isf(IsfArgs),
    /// Correlate word scores with psycholinguistic rating norms.
    PsychCorr(PsychArgs),
    /// Write a score file from a checkpoint, a score file, or a baseline.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Nws,
    Avg,
    Isf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IsfSource {
    /// Sentence frequencies from the training corpus.
    Corpus,
    /// Sentence frequencies from each evaluation dataset's own sentences.
    Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Kv,
}

#[derive(Debug, Args)]
pub struct EmbeddingArgs {
    /// Word-vector text file: a word then its components on each line.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Binary cache for the embeddings, rebuilt when the source changes.
    #[arg(long)]
    pub embedding_cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub emb: EmbeddingArgs,
    /// Corpus: one sentence per line, blank line between documents.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output score file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Noise sentences per instance (1-10).
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: u32,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 1)]
    pub negatives_per_anchor: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    /// Clip each gradient coordinate to [-CLIP, CLIP].
    #[arg(long)]
    pub clip: Option<f64>,
    /// Count repeated words in a sentence once per occurrence.
    #[arg(long)]
    pub multiset: bool,
    /// Per-epoch loss log [default: <out>.loss.tsv].
    #[arg(long)]
    pub loss_log: Option<PathBuf>,
    /// Checkpoint written after every epoch [default: <out>.ckpt].
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue training from a checkpoint.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub emb: EmbeddingArgs,
    /// STS dataset: a TSV, a SemEval `STS.input.*.txt` file, or `INPUT::GOLD`.
    #[arg(long, required = true)]
    pub dataset: Vec<String>,
    /// Weighting scheme; taken from the score file when --salience is given.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Score file (NWS, ISF or AVG).
    #[arg(long)]
    pub salience: Option<PathBuf>,
    /// Corpus for ISF sentence frequencies.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = IsfSource::Corpus)]
    pub isf_source: IsfSource,
    /// Second score file to test against the first for significance.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long)]
    pub multiset: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Also write the key: value report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IsfArgs {
    #[command(flatten)]
    pub emb: EmbeddingArgs,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PsychArgs {
    /// Score file.
    #[arg(long)]
    pub salience: PathBuf,
    /// Ratings CSV with a `word` column and any of arousal, valence,
    /// dominance, concreteness, imageability.
    #[arg(long, alias = "dataset")]
    pub ratings: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Score file or checkpoint to export as a plain score file.
    #[arg(long, conflicts_with = "scheme")]
    pub salience: Option<PathBuf>,
    /// Baseline to export instead.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn require_files<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<()> {
    for p in paths {
        if !p.is_file() {
            return Err(NwsError::MissingFile(p.to_path_buf()));
        }
    }
    Ok(())
}

fn load_embeddings(args: &EmbeddingArgs, log: &mut dyn Write) -> Result<Embeddings> {
    require_files([args.embeddings.as_path()])?;
    let emb = match &args.embedding_cache {
        Some(cache) => load_embeddings_cached(&args.embeddings, cache)?,
        None => load_embedding_file(&args.embeddings)?,
    };
    let r = &emb.report;
    let _ = writeln!(
        log,
        "embeddings: {} words, d={}, skipped {} (duplicates {}, malformed {}, non-finite {})",
        emb.vocab.len(),
        emb.table.dim(),
        r.skipped(),
        r.duplicates,
        r.malformed,
        r.non_finite
    );
    Ok(emb)
}

fn semantics(multiset: bool) -> Semantics {
    if multiset {
        Semantics::Multiset
    } else {
        Semantics::Set
    }
}

pub fn train_config(args: &TrainArgs) -> TrainConfig {
    TrainConfig {
        noise_size: args.k,
        negatives_per_anchor: args.negatives_per_anchor,
        epochs: args.epochs,
        learning_rate: args.lr,
        seed: args.seed,
        adagrad_epsilon: args.epsilon,
        semantics: semantics(args.multiset),
        clip: args.clip,
    }
}

fn config_pairs(cfg: &TrainConfig) -> Vec<(String, String)> {
    let clip = cfg.clip.map_or("none".to_string(), |c| c.to_string());
    [
        ("k", cfg.noise_size.to_string()),
        ("negatives_per_anchor", cfg.negatives_per_anchor.to_string()),
        ("epochs", cfg.epochs.to_string()),
        ("lr", cfg.learning_rate.to_string()),
        ("epsilon", cfg.adagrad_epsilon.to_string()),
        ("multiset", (cfg.semantics == Semantics::Multiset).to_string()),
        ("clip", clip),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

pub fn cmd_train(args: &TrainArgs, log: &mut dyn Write) -> Result<()> {
    require_files([args.emb.embeddings.as_path(), args.corpus.as_path()])?;
    let emb = load_embeddings(&args.emb, log)?;
    let (corpus, ingest) = read_corpus(&args.corpus, &emb.vocab)?;
    let _ = write!(log, "{ingest}");

    let config = train_config(args);
    let trainer = Trainer::new(&corpus, &emb.table, config.clone())?;
    let provenance = Provenance {
        kind: SchemeKind::Nws,
        dim: emb.table.dim(),
        vocab_size: emb.vocab.len(),
        seed: config.seed,
        config: config_pairs(&config),
        inputs: vec![
            InputRecord::of("embeddings", &args.emb.embeddings)?,
            InputRecord::of("corpus", &args.corpus)?,
        ],
    };

    let (mut salience, mut losses) = match &args.resume {
        Some(path) => {
            require_files([path.as_path()])?;
            let ckpt = ScoreFile::read(path)?;
            let table = ckpt.to_salience(&emb.vocab, path)?;
            let _ = writeln!(log, "resuming from {} after epoch {}", path.display(), table.epoch_count());
            let losses: Vec<(u32, f64)> =
                ckpt.losses.into_iter().filter(|(e, _)| *e <= table.epoch_count()).collect();
            (table, losses)
        }
        None => (trainer.init()?, Vec::new()),
    };

    let ckpt_path = args.checkpoint.clone().unwrap_or_else(|| sibling(&args.out, ".ckpt"));
    while salience.epoch_count() < config.epochs {
        let stats = trainer.run_epoch(&mut salience)?;
        let _ = writeln!(log, "epoch {}\tmean_loss {}\tinstances {}", stats.epoch, stats.mean_loss, stats.instances);
        losses.push((stats.epoch, stats.mean_loss));
        ScoreFile::checkpoint(provenance.clone(), &emb.vocab, &salience, &losses).write(&ckpt_path)?;
    }

    ScoreFile::from_salience(provenance.clone(), &emb.vocab, &salience).write(&args.out)?;
    let loss_path = args.loss_log.clone().unwrap_or_else(|| sibling(&args.out, ".loss.tsv"));
    write_text(&loss_path, &render_loss_log(&provenance, &losses))?;
    let _ = writeln!(log, "wrote {} and {}", args.out.display(), loss_path.display());
    Ok(())
}

fn isf_scheme_from_corpus(path: &Path, vocab: &Vocabulary) -> Result<(WeightingScheme, usize)> {
    let (corpus, _) = read_corpus(path, vocab)?;
    let total = corpus.sentence_count();
    let scheme = WeightingScheme::isf(&corpus.sentence_frequencies(), total)?;
    Ok((scheme, total))
}

fn isf_scheme_from_pairs(pairs: &[StsPair], vocab: &Vocabulary) -> Result<WeightingScheme> {
    let mut freq = vec![0u32; vocab.len()];
    let mut total = 0;
    for p in pairs {
        for text in [&p.sentence_a, &p.sentence_b] {
            total += 1;
            for id in Sentence::from_text(text, vocab).word_set() {
                freq[id.index()] += 1;
            }
        }
    }
    Ok(WeightingScheme::isf(&freq, total)?)
}

/// How sentence weights are obtained for one side of an evaluation.
enum SchemeSource {
    Fixed(WeightingScheme),
    IsfPerDataset,
}

impl SchemeSource {
    fn for_dataset(&self, ds: &StsDataset, vocab: &Vocabulary) -> Result<WeightingScheme> {
        match self {
            SchemeSource::Fixed(s) => Ok(s.clone()),
            SchemeSource::IsfPerDataset => isf_scheme_from_pairs(&ds.pairs, vocab),
        }
    }
}

fn load_score_scheme(path: &Path, emb: &Embeddings, log: &mut dyn Write) -> Result<WeightingScheme> {
    require_files([path])?;
    let file = ScoreFile::read(path)?;
    check_dim(&file.provenance, &emb.table, path)?;
    let (scheme, missing) = file.scheme_for(&emb.vocab);
    if missing > 0 {
        let _ = writeln!(log, "warning: {missing} vocabulary words missing from {}; weight 0", path.display());
    }
    Ok(scheme)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| NwsError::Usage(format!("cannot start evaluation threads: {e}")))
}

fn evaluate(
    pool: &rayon::ThreadPool,
    pairs: &[StsPair],
    scheme: &WeightingScheme,
    table: &EmbeddingTable,
    vocab: &Vocabulary,
    sem: Semantics,
) -> nws_core::Result<CorrelationReport> {
    let scores: Vec<_> = pool.install(|| pairs.par_iter().map(|p| score_pair(p, scheme, table, vocab, sem)).collect());
    report_from_scores(pairs, &scores)
}

pub fn cmd_eval_sts(args: &EvalArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    let sources: Vec<DatasetSource> = args.dataset.iter().map(|d| DatasetSource::from_arg(d)).collect();
    require_files(
        std::iter::once(args.emb.embeddings.as_path()).chain(sources.iter().flat_map(DatasetSource::paths)),
    )?;
    let emb = load_embeddings(&args.emb, log)?;
    let sem = semantics(args.multiset);

    let mut inputs = vec![InputRecord::of("embeddings", &args.emb.embeddings)?];
    let (primary, kind) = match (&args.salience, args.scheme) {
        (Some(path), requested) => {
            let scheme = load_score_scheme(path, &emb, log)?;
            if let Some(req) = requested {
                if scheme_kind(req) != scheme.kind {
                    return Err(NwsError::Usage(format!(
                        "--scheme {req:?} conflicts with {} scores in {}",
                        scheme.kind,
                        path.display()
                    )));
                }
            }
            inputs.push(InputRecord::of("salience", path)?);
            let kind = scheme.kind;
            (SchemeSource::Fixed(scheme), kind)
        }
        (None, Some(SchemeArg::Avg)) => (SchemeSource::Fixed(WeightingScheme::avg(emb.vocab.len())), SchemeKind::Avg),
        (None, Some(SchemeArg::Isf)) => match (args.isf_source, &args.corpus) {
            (IsfSource::Dataset, _) => (SchemeSource::IsfPerDataset, SchemeKind::Isf),
            (IsfSource::Corpus, Some(corpus)) => {
                require_files([corpus.as_path()])?;
                inputs.push(InputRecord::of("corpus", corpus)?);
                (SchemeSource::Fixed(isf_scheme_from_corpus(corpus, &emb.vocab)?.0), SchemeKind::Isf)
            }
            (IsfSource::Corpus, None) => {
                return Err(NwsError::Usage("--scheme isf needs --corpus or --isf-source dataset".into()))
            }
        },
        (None, Some(SchemeArg::Nws) | None) => {
            return Err(NwsError::Usage("--scheme nws needs --salience <score file>".into()))
        }
    };
    let compare = match &args.compare {
        Some(path) => {
            inputs.push(InputRecord::of("compare", path)?);
            Some(load_score_scheme(path, &emb, log)?)
        }
        None => None,
    };

    let pool = thread_pool()?;
    let mut rows = Vec::new();
    for source in &sources {
        let ds = read_sts(source)?;
        for path in source.paths() {
            inputs.push(InputRecord::of(&format!("dataset.{}", ds.name), path)?);
        }
        if ds.pairs.is_empty() && ds.malformed > 0 && ds.malformed == ds.lines {
            return Err(NwsError::format(source.paths()[0], 0, "every dataset line is malformed"));
        }
        let scheme = primary.for_dataset(&ds, &emb.vocab)?;
        let outcome = evaluate(&pool, &ds.pairs, &scheme, &emb.table, &emb.vocab, sem).map_err(|e| e.to_string());
        let compare = compare.as_ref().map(|alt| {
            let alt_report = evaluate(&pool, &ds.pairs, alt, &emb.table, &emb.vocab, sem).map_err(|e| e.to_string())?;
            let main = outcome.as_ref().map_err(Clone::clone)?;
            let sig = significance(main.r, main.n, alt_report.r, alt_report.n).map_err(|e| e.to_string())?;
            Ok((alt_report, sig))
        });
        rows.push(StsRow {
            dataset: ds.name.clone(),
            malformed: ds.malformed,
            unannotated: ds.unannotated,
            outcome,
            compare,
        });
    }

    let label = kind.as_str();
    let rendered = match args.format {
        ReportFormat::Text => sts_text(&rows, label),
        ReportFormat::Kv => sts_kv(&rows, label),
    };
    out.write_all(rendered.as_bytes()).map_err(|e| NwsError::io("<stdout>", e))?;
    if let Some(path) = &args.out {
        let provenance = Provenance {
            kind,
            dim: emb.table.dim(),
            vocab_size: emb.vocab.len(),
            seed: 0,
            config: vec![
                ("multiset".into(), args.multiset.to_string()),
                ("isf_source".into(), format!("{:?}", args.isf_source).to_lowercase()),
            ],
            inputs,
        };
        let mut text = String::new();
        provenance.write_header(&mut text);
        text.push_str(&sts_kv(&rows, label));
        write_text(path, &text)?;
    }
    if rows.iter().all(|r| r.outcome.is_err()) {
        return Err(NwsError::Usage("no dataset could be evaluated".into()));
    }
    Ok(())
}

fn scheme_kind(arg: SchemeArg) -> SchemeKind {
    match arg {
        SchemeArg::Nws => SchemeKind::Nws,
        SchemeArg::Avg => SchemeKind::Avg,
        SchemeArg::Isf => SchemeKind::Isf,
    }
}

fn write_isf(embeddings: &Path, corpus: &Path, out: &Path, log: &mut dyn Write) -> Result<()> {
    require_files([embeddings, corpus])?;
    let emb = load_embeddings(&EmbeddingArgs { embeddings: embeddings.to_path_buf(), embedding_cache: None }, log)?;
    let (scheme, total) = isf_scheme_from_corpus(corpus, &emb.vocab)?;
    let provenance = Provenance {
        kind: SchemeKind::Isf,
        dim: emb.table.dim(),
        vocab_size: emb.vocab.len(),
        seed: 0,
        config: vec![("isf_source".into(), "corpus".into()), ("total_sentences".into(), total.to_string())],
        inputs: vec![InputRecord::of("embeddings", embeddings)?, InputRecord::of("corpus", corpus)?],
    };
    scheme_file(provenance, &emb.vocab, &scheme).write(out)?;
    let _ = writeln!(log, "wrote {}", out.display());
    Ok(())
}

pub fn cmd_isf(args: &IsfArgs, log: &mut dyn Write) -> Result<()> {
    if let Some(cache) = &args.emb.embedding_cache {
        // Warm the cache; the scores themselves only need the vocabulary.
        load_embeddings_cached(&args.emb.embeddings, cache)?;
    }
    write_isf(&args.emb.embeddings, &args.corpus, &args.out, log)
}

pub fn cmd_psych_corr(args: &PsychArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    require_files([args.salience.as_path(), args.ratings.as_path()])?;
    let scores = ScoreFile::read(&args.salience)?;
    let ratings = read_ratings(&args.ratings)?;
    if ratings.malformed > 0 {
        let _ = writeln!(log, "skipped {} malformed rating rows", ratings.malformed);
    }
    let map = scores.score_map();
    let results = psych_correlation(|w| map.get(w).copied(), &ratings.ratings);
    let rows: Vec<(Dimension, PsychRow)> = results
        .into_iter()
        .map(|(dim, res)| {
            let row = if !ratings.columns.contains(&dim) {
                PsychRow::Absent
            } else {
                match res {
                    Ok(c) => PsychRow::Ok(c),
                    Err(e) => PsychRow::Failed(e.to_string()),
                }
            };
            (dim, row)
        })
        .collect();
    let rendered = match args.format {
        ReportFormat::Text => psych_text(&rows),
        ReportFormat::Kv => psych_kv(&rows),
    };
    out.write_all(rendered.as_bytes()).map_err(|e| NwsError::io("<stdout>", e))?;
    if let Some(path) = &args.out {
        let provenance = Provenance {
            config: Vec::new(),
            inputs: vec![InputRecord::of("salience", &args.salience)?, InputRecord::of("ratings", &args.ratings)?],
            ..scores.provenance.clone()
        };
        let mut text = String::new();
        provenance.write_header(&mut text);
        text.push_str(&psych_kv(&rows));
        write_text(path, &text)?;
    }
    if rows.iter().any(|(_, r)| matches!(r, PsychRow::Ok(_))) {
        Ok(())
    } else {
        Err(NwsError::Usage("no rating dimension could be correlated".into()))
    }
}

pub fn cmd_export(args: &ExportArgs, log: &mut dyn Write) -> Result<()> {
    match (&args.salience, args.scheme) {
        (Some(path), _) => {
            require_files([path.as_path()])?;
            let mut file = ScoreFile::read(path)?;
            file.provenance.inputs.push(InputRecord::of("exported_from", path)?);
            file.accumulators = None;
            file.epoch = None;
            file.losses.clear();
            file.write(&args.out)?;
        }
        (None, Some(SchemeArg::Isf)) => {
            let (Some(emb), Some(corpus)) = (&args.embeddings, &args.corpus) else {
                return Err(NwsError::Usage("exporting ISF needs --embeddings and --corpus".into()));
            };
            return write_isf(emb, corpus, &args.out, log);
        }
        (None, Some(SchemeArg::Avg)) => {
            let Some(path) = &args.embeddings else {
                return Err(NwsError::Usage("exporting AVG needs --embeddings".into()));
            };
            let emb = load_embeddings(&EmbeddingArgs { embeddings: path.clone(), embedding_cache: None }, log)?;
            let provenance = Provenance {
                kind: SchemeKind::Avg,
                dim: emb.table.dim(),
                vocab_size: emb.vocab.len(),
                seed: 0,
                config: Vec::new(),
                inputs: vec![InputRecord::of("embeddings", path)?],
            };
            scheme_file(provenance, &emb.vocab, &WeightingScheme::avg(emb.vocab.len())).write(&args.out)?;
        }
        (None, Some(SchemeArg::Nws) | None) => {
            return Err(NwsError::Usage("export needs --salience, or --scheme avg|isf".into()));
        }
    }
    let _ = writeln!(log, "wrote {}", args.out.display());
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write, log: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a, log),
        Command::EvalSts(a) => cmd_eval_sts(a, out, log),
        Command::Isf(a) => cmd_isf(a, log),
        Command::PsychCorr(a) => cmd_psych_corr(a, out, log),
        Command::Export(a) => cmd_export(a, log),
    }
}

/// Corpus read with the vocabulary of `embeddings`; exposed for tooling.
pub fn load_corpus(embeddings: &Path, corpus: &Path) -> Result<(Vocabulary, Corpus)> {
    let emb = load_embedding_file(embeddings)?;
    let (c, _) = read_corpus(corpus, &emb.vocab)?;
    Ok((emb.vocab, c))
}
