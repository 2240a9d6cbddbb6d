//! Text renderings of evaluation results: aligned columns for people and
//! `key: value` lines for scripts.

use std::fmt::Write as _;

use nws_core::stats::Significance;
use nws_core::{CorrelationReport, Dimension};

/// Result row for one STS dataset.
#[derive(Debug, Clone)]
pub struct StsRow {
    pub dataset: String,
    pub malformed: usize,
    pub unannotated: usize,
    pub outcome: Result<CorrelationReport, String>,
    pub compare: Option<Result<(CorrelationReport, Significance), String>>,
}

/// Unweighted mean of the per-dataset correlations that could be computed.
pub fn overall_average(rows: &[StsRow]) -> Option<f64> {
    let rs: Vec<f64> = rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(|c| c.r)).collect();
    (!rs.is_empty()).then(|| rs.iter().sum::<f64>() / rs.len() as f64)
}

fn compare_average(rows: &[StsRow]) -> Option<f64> {
    let rs: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.compare.as_ref()?.as_ref().ok().map(|(c, _)| c.r))
        .collect();
    (!rs.is_empty()).then(|| rs.iter().sum::<f64>() / rs.len() as f64)
}

pub fn sts_text(rows: &[StsRow], scheme: &str) -> String {
    let width = rows.iter().map(|r| r.dataset.len()).chain([15]).max().unwrap_or(15);
    let comparing = rows.iter().any(|r| r.compare.is_some());
    let mut out = String::new();
    write!(
        out,
        "{:<width$}  {:>6}  {:>7}  {:>9}  {:>8}  {:>8}  {:>8}",
        "dataset", "n", "skipped", "malformed", scheme, "ci_low", "ci_high"
    )
    .unwrap();
    if comparing {
        write!(out, "  {:>8}  {:>8}  sig@.05", "compare", "z").unwrap();
    }
    out.push('\n');
    for row in rows {
        write!(out, "{:<width$}  ", row.dataset).unwrap();
        match &row.outcome {
            Ok(c) => write!(
                out,
                "{:>6}  {:>7}  {:>9}  {:>8.4}  {:>8.4}  {:>8.4}",
                c.n, c.skipped_pairs, row.malformed, c.r, c.ci_low, c.ci_high
            )
            .unwrap(),
            Err(e) => write!(out, "error: {e}").unwrap(),
        }
        match &row.compare {
            Some(Ok((c, sig))) => {
                write!(out, "  {:>8.4}  {:>8.3}  {}", c.r, sig.z, if sig.significant_at_05 { "yes" } else { "no" })
                    .unwrap()
            }
            Some(Err(e)) => write!(out, "  compare error: {e}").unwrap(),
            None => {}
        }
        out.push('\n');
    }
    let blank = "";
    write!(out, "{:<width$}  {blank:>6}  {blank:>7}  {blank:>9}  ", "overall average").unwrap();
    match overall_average(rows) {
        Some(avg) => write!(out, "{avg:>8.4}").unwrap(),
        None => write!(out, "{:>8}", "-").unwrap(),
    }
    if let Some(avg) = compare_average(rows) {
        write!(out, "  {blank:>8}  {blank:>8}  {avg:>8.4}").unwrap();
    }
    out.push('\n');
    out
}

fn kv_report(out: &mut String, prefix: &str, c: &CorrelationReport) {
    writeln!(out, "{prefix}.r: {}", c.r).unwrap();
    writeln!(out, "{prefix}.n: {}", c.n).unwrap();
    writeln!(out, "{prefix}.fisher: {}", c.fisher).unwrap();
    writeln!(out, "{prefix}.ci_low: {}", c.ci_low).unwrap();
    writeln!(out, "{prefix}.ci_high: {}", c.ci_high).unwrap();
    writeln!(out, "{prefix}.skipped: {}", c.skipped_pairs).unwrap();
    writeln!(out, "{prefix}.degenerate: {}", c.degenerate).unwrap();
}

pub fn sts_kv(rows: &[StsRow], scheme: &str) -> String {
    let mut out = String::new();
    writeln!(out, "scheme: {scheme}").unwrap();
    for row in rows {
        let p = &row.dataset;
        writeln!(out, "{p}.malformed: {}", row.malformed).unwrap();
        writeln!(out, "{p}.unannotated: {}", row.unannotated).unwrap();
        match &row.outcome {
            Ok(c) => kv_report(&mut out, p, c),
            Err(e) => writeln!(out, "{p}.error: {e}").unwrap(),
        }
        match &row.compare {
            Some(Ok((c, sig))) => {
                kv_report(&mut out, &format!("{p}.compare"), c);
                writeln!(out, "{p}.compare.z: {}", sig.z).unwrap();
                writeln!(out, "{p}.compare.significant_at_05: {}", sig.significant_at_05).unwrap();
                writeln!(out, "{p}.compare.ci_overlap: {}", sig.intervals_overlap).unwrap();
            }
            Some(Err(e)) => writeln!(out, "{p}.compare.error: {e}").unwrap(),
            None => {}
        }
    }
    if let Some(avg) = overall_average(rows) {
        writeln!(out, "overall.r_mean: {avg}").unwrap();
    }
    if let Some(avg) = compare_average(rows) {
        writeln!(out, "overall.compare.r_mean: {avg}").unwrap();
    }
    out
}

/// Per-dimension outcome of the rating correlation.
#[derive(Debug, Clone)]
pub enum PsychRow {
    /// The ratings file has no column for the dimension.
    Absent,
    Failed(String),
    Ok(CorrelationReport),
}

pub fn psych_text(rows: &[(Dimension, PsychRow)]) -> String {
    let mut out = format!("{:<14}  {:>6}  {:>8}  {:>8}  {:>8}\n", "dimension", "n", "r", "ci_low", "ci_high");
    for (dim, row) in rows {
        write!(out, "{:<14}  ", dim.name()).unwrap();
        match row {
            PsychRow::Absent => out.push_str("absent"),
            PsychRow::Failed(e) => write!(out, "error: {e}").unwrap(),
            PsychRow::Ok(c) => {
                write!(out, "{:>6}  {:>8.4}  {:>8.4}  {:>8.4}", c.n, c.r, c.ci_low, c.ci_high).unwrap()
            }
        }
        out.push('\n');
    }
    out
}

pub fn psych_kv(rows: &[(Dimension, PsychRow)]) -> String {
    let mut out = String::new();
    for (dim, row) in rows {
        let p = dim.name();
        match row {
            PsychRow::Absent => writeln!(out, "{p}.status: absent").unwrap(),
            PsychRow::Failed(e) => writeln!(out, "{p}.status: error\n{p}.error: {e}").unwrap(),
            PsychRow::Ok(c) => {
                writeln!(out, "{p}.status: ok").unwrap();
                kv_report(&mut out, p, c);
            }
        }
    }
    out
}
