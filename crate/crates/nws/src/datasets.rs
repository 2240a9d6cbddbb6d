//! Evaluation inputs: sentence-similarity datasets and word rating norms.
//!
//! Two STS layouts are read:
//!
//! * a single TSV with `sentence_a<TAB>sentence_b<TAB>gold` per line;
//! * the SemEval pair: `STS.input.<name>.txt` (two tab-separated sentences
//!   per line, extra columns ignored) with `STS.gs.<name>.txt` (one score per
//!   line; a blank line marks an unannotated pair).

use std::path::{Path, PathBuf};

use nws_core::{Dimension, PsychRating, StsPair};

use crate::error::{NwsError, Result};
use crate::io::{for_each_line, open};

/// Where an STS dataset lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetSource {
    Tsv(PathBuf),
    Paired { input: PathBuf, gold: PathBuf },
}

impl DatasetSource {
    /// Interprets a `--dataset` argument.
    ///
    /// `INPUT::GOLD` names both files of a pair explicitly. A path named
    /// `STS.input.<name>.txt` with an `STS.gs.<name>.txt` sibling is read as
    /// a pair. Anything else is a single TSV.
    pub fn from_arg(arg: &str) -> Self {
        if let Some((input, gold)) = arg.split_once("::") {
            return DatasetSource::Paired { input: input.into(), gold: gold.into() };
        }
        let path = PathBuf::from(arg);
        if let Some(rest) = path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_prefix("STS.input.")) {
            let gold = path.with_file_name(format!("STS.gs.{rest}"));
            if gold.exists() {
                return DatasetSource::Paired { input: path, gold };
            }
        }
        DatasetSource::Tsv(path)
    }

    pub fn name(&self) -> String {
        let file = match self {
            DatasetSource::Tsv(p) | DatasetSource::Paired { input: p, .. } => p,
        };
        let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
        stem.strip_prefix("STS.input.").unwrap_or(stem).to_string()
    }

    pub fn paths(&self) -> Vec<&Path> {
        match self {
            DatasetSource::Tsv(p) => vec![p],
            DatasetSource::Paired { input, gold } => vec![input, gold],
        }
    }
}

/// A loaded STS dataset with its parse counters.
#[derive(Debug, Clone, PartialEq)]
pub struct StsDataset {
    pub name: String,
    pub pairs: Vec<StsPair>,
    pub lines: usize,
    pub malformed: usize,
    pub unannotated: usize,
}

fn parse_gold(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|g| g.is_finite())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for_each_line(path, |l| lines.push(l.to_string()))?;
    Ok(lines)
}

pub fn read_sts(source: &DatasetSource) -> Result<StsDataset> {
    let mut ds = StsDataset { name: source.name(), pairs: Vec::new(), lines: 0, malformed: 0, unannotated: 0 };
    match source {
        DatasetSource::Tsv(path) => {
            for_each_line(path, |line| {
                if line.trim().is_empty() {
                    return;
                }
                ds.lines += 1;
                let fields: Vec<&str> = line.split('\t').collect();
                match (fields.as_slice(), fields.get(2).and_then(|g| parse_gold(g))) {
                    ([a, b, _], Some(gold)) => ds.pairs.push(StsPair::new(*a, *b, gold)),
                    _ => ds.malformed += 1,
                }
            })?;
        }
        DatasetSource::Paired { input, gold } => {
            let inputs = read_lines(input)?;
            let golds = read_lines(gold)?;
            ds.lines = inputs.len().max(golds.len());
            for i in 0..ds.lines {
                let (Some(line), Some(score)) = (inputs.get(i), golds.get(i)) else {
                    ds.malformed += 1;
                    continue;
                };
                if score.trim().is_empty() {
                    ds.unannotated += 1;
                    continue;
                }
                let fields: Vec<&str> = line.split('\t').collect();
                match (fields.len() >= 2, parse_gold(score)) {
                    (true, Some(g)) => ds.pairs.push(StsPair::new(fields[0], fields[1], g)),
                    _ => ds.malformed += 1,
                }
            }
        }
    }
    Ok(ds)
}

/// Rating norms from a CSV whose header names `word` and any of the five
/// dimensions. Empty cells are missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsFile {
    pub ratings: Vec<PsychRating>,
    /// Dimensions that have a column in the file.
    pub columns: Vec<Dimension>,
    pub malformed: usize,
}

pub fn read_ratings(path: &Path) -> Result<RatingsFile> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(open(path)?);
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        NwsError::format(path, line, e.to_string())
    };
    let headers = reader.headers().map_err(csv_err)?.clone();
    let word_col = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("word"))
        .ok_or_else(|| NwsError::format(path, 1, "header has no `word` column"))?;
    let columns: Vec<(usize, Dimension)> =
        headers.iter().enumerate().filter_map(|(i, h)| Some((i, h.parse::<Dimension>().ok()?))).collect();

    let mut out = RatingsFile { ratings: Vec::new(), columns: columns.iter().map(|c| c.1).collect(), malformed: 0 };
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let Some(word) = record.get(word_col).filter(|w| !w.is_empty()) else {
            out.malformed += 1;
            continue;
        };
        let mut rating = PsychRating::new(word.to_lowercase());
        let mut bad = false;
        for &(col, dim) in &columns {
            match record.get(col).unwrap_or("") {
                "" => {}
                cell => match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => rating.set(dim, Some(v)),
                    _ => bad = true,
                },
            }
        }
        if bad || !rating.has_any() {
            out.malformed += 1;
        } else {
            out.ratings.push(rating);
        }
    }
    Ok(out)
}
