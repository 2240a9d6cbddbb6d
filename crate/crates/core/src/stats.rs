//! Correlation statistics: cosine, Pearson, the Fisher transformation,
//! confidence intervals and the two-sample z-test on correlations.

use core::fmt;

use crate::math::{compensated_sum, dot, norm};
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// Cosine similarity, with a flag for zero-norm inputs (scored as 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cosine {
    pub value: f64,
    pub degenerate: bool,
}

pub fn cosine(u: &[f64], v: &[f64]) -> Cosine {
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Cosine { value: 0.0, degenerate: true };
    }
    let value = (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0);
    Cosine { value, degenerate: false }
}

/// Pearson product-moment correlation (two-pass, compensated sums).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewObservations { required: 3, got: n });
    }
    let mean_x = compensated_sum(x.iter().copied()) / n as f64;
    let mean_y = compensated_sum(y.iter().copied()) / n as f64;
    let dx = || x.iter().map(move |a| a - mean_x);
    let dy = || y.iter().map(move |b| b - mean_y);
    let sxx = compensated_sum(dx().map(|a| a * a));
    let syy = compensated_sum(dy().map(|b| b * b));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sxy = compensated_sum(dx().zip(dy()).map(|(a, b)| a * b));
    Ok((sxy / (libm::sqrt(sxx) * libm::sqrt(syy))).clamp(-1.0, 1.0))
}

/// `F(r) = atanh(r) = ½ ln((1 + r) / (1 - r))`.
pub fn fisher_transform(r: f64) -> Result<f64> {
    if r.is_nan() || r.abs() >= 1.0 {
        return Err(Error::CorrelationDomain(r));
    }
    Ok(0.5 * libm::log((1.0 + r) / (1.0 - r)))
}

/// 95% interval `tanh(F(r) ± 1.96 / sqrt(n - 3))`.
pub fn fisher_ci(r: f64, n: usize) -> Result<(f64, f64)> {
    if n < 4 {
        return Err(Error::TooFewObservations { required: 4, got: n });
    }
    let f = fisher_transform(r)?;
    let half = Z_95 / libm::sqrt((n - 3) as f64);
    Ok((libm::tanh(f - half), libm::tanh(f + half)))
}

/// Outcome of comparing two independent correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Significance {
    pub z: f64,
    pub significant_at_05: bool,
    /// Whether the two 95% intervals overlap.
    pub intervals_overlap: bool,
}

/// `z = (F(r1) - F(r2)) / sqrt(1/(n1-3) + 1/(n2-3))`, significant when
/// `|z| > 1.96`.
pub fn significance(r1: f64, n1: usize, r2: f64, n2: usize) -> Result<Significance> {
    let (lo1, hi1) = fisher_ci(r1, n1)?;
    let (lo2, hi2) = fisher_ci(r2, n2)?;
    let se = libm::sqrt(1.0 / (n1 - 3) as f64 + 1.0 / (n2 - 3) as f64);
    let z = (fisher_transform(r1)? - fisher_transform(r2)?) / se;
    Ok(Significance {
        z,
        significant_at_05: z.abs() > Z_95,
        intervals_overlap: lo1 <= hi2 && lo2 <= hi1,
    })
}

/// Pearson correlation with its Fisher value and 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub r: f64,
    pub n: usize,
    /// `atanh(r)`; infinite when `|r| = 1`.
    pub fisher: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub skipped_pairs: usize,
    /// Pairs scored 0 because a sentence embedding had zero norm.
    pub degenerate: usize,
}

impl CorrelationReport {
    /// Correlates `x` with `y`.
    ///
    /// With `|r| = 1` the interval collapses to `[r, r]`; with `n = 3` it is
    /// the uninformative `[-1, 1]`.
    pub fn from_samples(x: &[f64], y: &[f64]) -> Result<Self> {
        let r = pearson(x, y)?;
        let n = x.len();
        let (fisher, ci_low, ci_high) = if r.abs() >= 1.0 {
            (libm::atanh(r), r, r)
        } else if n < 4 {
            (fisher_transform(r)?, -1.0, 1.0)
        } else {
            let (lo, hi) = fisher_ci(r, n)?;
            (fisher_transform(r)?, lo, hi)
        };
        Ok(Self { r, n, fisher, ci_low, ci_high, skipped_pairs: 0, degenerate: 0 })
    }
}

impl fmt::Display for CorrelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={:.4} n={} ci=[{:.4}, {:.4}] skipped={}",
            self.r, self.n, self.ci_low, self.ci_high, self.skipped_pairs
        )
    }
}
