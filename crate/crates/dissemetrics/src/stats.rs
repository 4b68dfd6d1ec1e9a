//! Distribution fitting and rank correlation.
//!
//! The unique-user counts of a mention corpus are heavy-tailed; this module
//! fits a discrete power law by maximum likelihood with the half-integer
//! continuity correction, selects the tail cutoff by scanning every distinct
//! sample value for the smallest Kolmogorov-Smirnov distance, and provides
//! Spearman rank correlation with average-rank tie handling.

use serde::Serialize;
use thiserror::Error;

/// Fitted discrete power-law tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u64,
    pub ks_distance: f64,
    pub n_tail: u64,
}

/// How the tail cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XminPolicy {
    Fixed(u64),
    /// Evaluate every distinct sample value; keep the candidate minimizing
    /// the KS distance, smaller xmin on ties.
    ScanKs,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("fewer than two samples at or above xmin")]
    InsufficientTail,
    #[error("all tail samples are equal")]
    DegenerateTail,
    #[error("empty sample")]
    EmptySample,
    #[error("input lengths differ")]
    LengthMismatch,
    #[error("zero rank variance on one side")]
    DegenerateRanks,
}

/// Distinct values ascending with their multiplicities and suffix statistics.
struct TailTable {
    values: Vec<u64>,
    /// Count of samples >= values[i].
    suffix_count: Vec<u64>,
    /// Sum of ln(sample) over samples >= values[i].
    suffix_ln_sum: Vec<f64>,
}

fn tail_table(samples: &[u64]) -> TailTable {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let mut values = Vec::new();
    let mut counts: Vec<u64> = Vec::new();
    let mut ln_sums: Vec<f64> = Vec::new();
    for &x in &sorted {
        if values.last() == Some(&x) {
            *counts.last_mut().unwrap() += 1;
            *ln_sums.last_mut().unwrap() += (x as f64).ln();
        } else {
            values.push(x);
            counts.push(1);
            ln_sums.push((x as f64).ln());
        }
    }
    let mut suffix_count = vec![0u64; values.len()];
    let mut suffix_ln_sum = vec![0f64; values.len()];
    let mut count_acc = 0u64;
    let mut ln_acc = 0f64;
    for i in (0..values.len()).rev() {
        count_acc += counts[i];
        ln_acc += ln_sums[i];
        suffix_count[i] = count_acc;
        suffix_ln_sum[i] = ln_acc;
    }
    TailTable { values, suffix_count, suffix_ln_sum }
}

impl TailTable {
    /// Index of the first distinct value >= xmin, if any.
    fn tail_start(&self, xmin: u64) -> Option<usize> {
        match self.values.binary_search(&xmin) {
            Ok(i) => Some(i),
            Err(i) if i < self.values.len() => Some(i),
            Err(_) => None,
        }
    }

    /// MLE alpha and KS distance for the tail at `values[start..]`.
    fn fit_at(&self, start: usize, xmin: u64) -> Result<(f64, f64), StatsError> {
        let n_tail = self.suffix_count[start];
        if n_tail < 2 {
            return Err(StatsError::InsufficientTail);
        }
        if start == self.values.len() - 1 {
            return Err(StatsError::DegenerateTail);
        }
        let shifted = xmin as f64 - 0.5;
        let log_sum = self.suffix_ln_sum[start] - n_tail as f64 * shifted.ln();
        let alpha = 1.0 + n_tail as f64 / log_sum;

        // KS distance between the empirical tail CCDF and the fitted one,
        // evaluated at every distinct tail value.
        let mut ks = 0f64;
        for i in start..self.values.len() {
            let empirical = self.suffix_count[i] as f64 / n_tail as f64;
            let fitted = ((self.values[i] as f64 - 0.5) / shifted).powf(-(alpha - 1.0));
            ks = ks.max((empirical - fitted).abs());
        }
        Ok((alpha, ks))
    }
}

/// Fits a discrete power law to positive-integer samples.
///
/// Alpha uses the discrete MLE approximation
/// `1 + n / sum(ln(x_i / (xmin - 0.5)))` over the tail `x_i >= xmin`.
pub fn fit_power_law(samples: &[u64], policy: XminPolicy) -> Result<PowerLawFit, StatsError> {
    // The family is defined over positive integers; zeros have no finite
    // log-likelihood and are dropped.
    let positive: Vec<u64> = samples.iter().copied().filter(|&x| x > 0).collect();
    let table = tail_table(&positive);
    if table.values.is_empty() {
        return Err(StatsError::InsufficientTail);
    }
    match policy {
        XminPolicy::Fixed(xmin) => {
            let xmin = xmin.max(1);
            let start = table.tail_start(xmin).ok_or(StatsError::InsufficientTail)?;
            let (alpha, ks_distance) = table.fit_at(start, xmin)?;
            Ok(PowerLawFit {
                alpha,
                xmin,
                ks_distance,
                n_tail: table.suffix_count[start],
            })
        }
        XminPolicy::ScanKs => {
            let mut best: Option<PowerLawFit> = None;
            let mut seen_valid = false;
            for (start, &xmin) in table.values.iter().enumerate() {
                let Ok((alpha, ks_distance)) = table.fit_at(start, xmin) else {
                    continue;
                };
                seen_valid = true;
                let candidate = PowerLawFit {
                    alpha,
                    xmin,
                    ks_distance,
                    n_tail: table.suffix_count[start],
                };
                // Strict less-than keeps the smaller xmin on ties.
                if best.as_ref().is_none_or(|b| candidate.ks_distance < b.ks_distance) {
                    best = Some(candidate);
                }
            }
            match best {
                Some(fit) => Ok(fit),
                None if table.values.len() == 1 && positive.len() >= 2 => {
                    Err(StatsError::DegenerateTail)
                }
                None if seen_valid => unreachable!(),
                None => Err(StatsError::InsufficientTail),
            }
        }
    }
}

/// Draws one discrete power-law sample by inverse transform, using the same
/// continuity-corrected family the fitter assumes.
pub fn sample_power_law<R: rand::Rng>(rng: &mut R, alpha: f64, xmin: u64) -> u64 {
    let u: f64 = rng.gen();
    let x = (xmin as f64 - 0.5) * (1.0 - u).powf(-1.0 / (alpha - 1.0)) + 0.5;
    // Guard the astronomically unlikely overflow of the unbounded tail.
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x as u64
    }
}

/// Empirical probability mass and complementary CDF per distinct value.
///
/// The CCDF at `v` is `P(X >= v)`, so the first row is always 1.
pub fn pdf_ccdf(samples: &[u64]) -> Result<Vec<(u64, f64, f64)>, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let table = tail_table(samples);
    let n = samples.len() as f64;
    let rows = table
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let above = table.suffix_count[i];
            let here = above - table.suffix_count.get(i + 1).copied().unwrap_or(0);
            (v, here as f64 / n, above as f64 / n)
        })
        .collect();
    Ok(rows)
}

/// Average ranks (1-based); ties receive the mean of the ranks they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0f64; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &index in &order[i..=j] {
            ranks[index] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch);
    }
    if xs.len() < 2 {
        return Err(StatsError::DegenerateRanks);
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mean_x = rx.iter().sum::<f64>() / n;
    let mean_y = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in rx.iter().zip(&ry) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(StatsError::DegenerateRanks);
    }
    Ok(cov / (var_x * var_y).sqrt())
}

/// Correlation between recorded and still-available mention counts.
///
/// One pair per publication: (recorded total, recorded minus unavailable).
pub fn stability_correlation(pairs: &[(u64, u64)]) -> Result<f64, StatsError> {
    let recorded: Vec<f64> = pairs.iter().map(|(t, _)| *t as f64).collect();
    let available: Vec<f64> = pairs
        .iter()
        .map(|(t, u)| t.saturating_sub(*u) as f64)
        .collect();
    spearman(&recorded, &available)
}
