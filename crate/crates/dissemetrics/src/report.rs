//! Report files: fixed-header CSVs and atomic output.
//!
//! Every numeric rate is printed with six decimals. Output files go through a
//! temp-file rename so a crashed run never leaves a half-written report.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::audit::{ReasonTally, YearlyDistribution};
use crate::cascade::{RiskSummary, WorstCase};
use crate::metrics::{StructureMetrics, UnavailabilityBreakdown};

pub const METRICS_HEADER: &str =
    "publication_id,TWS,NUTU,N_OT,N_RT,DO,DC,quadrant,N_UnT,TUnR,N_UnOT,N_UnRT,Max_N_UnRT";
pub const BREAKDOWN_HEADER: &str =
    "publication_id,TWS,N_OT,N_UnT,TUnR,N_UnOT,N_UnRT,Max_N_UnRT";
pub const YEARLY_HEADER: &str = "year,total_with_date,unavailable,share";
pub const REASON_HEADER: &str = "reason,count,share";
pub const RISK_HEADER: &str =
    "publication_id,mean_loss,p50,p90,p99,max_loss,worst_event_kind,worst_event_target,worst_loss";
pub const PDF_CCDF_HEADER: &str = "value,pdf,ccdf";

/// Six-decimal fixed-point rendering. Rust's float formatting rounds the
/// exact binary value half-to-even.
pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Quotes a CSV field only when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Per-publication metrics row plus its unavailability decomposition.
#[derive(Debug, Clone)]
pub struct PublicationRow {
    pub metrics: StructureMetrics,
    pub breakdown: UnavailabilityBreakdown,
}

pub fn metrics_csv(rows: &[PublicationRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for row in rows {
        let m = &row.metrics;
        let b = &row.breakdown;
        let quadrant = m.quadrant.map_or(String::new(), |q| q.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&m.publication_id),
            m.total_mentions,
            m.unique_users,
            m.originals,
            m.retweets,
            fmt6(m.originality),
            fmt6(m.concentration),
            quadrant,
            b.unavailable_total,
            fmt6(b.unavailability_rate),
            b.unavailable_originals,
            b.unavailable_retweets,
            b.max_unavailable_single_original,
        );
    }
    out
}

/// Table of the worst-hit publications, sorted by unavailability rate
/// descending (ties by publication id), truncated to `top`.
pub fn breakdown_csv(rows: &[PublicationRow], top: usize) -> String {
    let mut sorted: Vec<&PublicationRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        b.breakdown
            .unavailability_rate
            .total_cmp(&a.breakdown.unavailability_rate)
            .then_with(|| a.metrics.publication_id.cmp(&b.metrics.publication_id))
    });
    let mut out = String::from(BREAKDOWN_HEADER);
    out.push('\n');
    for row in sorted.into_iter().take(top) {
        let m = &row.metrics;
        let b = &row.breakdown;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&m.publication_id),
            m.total_mentions,
            m.originals,
            b.unavailable_total,
            fmt6(b.unavailability_rate),
            b.unavailable_originals,
            b.unavailable_retweets,
            b.max_unavailable_single_original,
        );
    }
    out
}

pub fn yearly_csv(distribution: &YearlyDistribution) -> String {
    let mut out = String::from(YEARLY_HEADER);
    out.push('\n');
    for (year, bucket) in &distribution.years {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            year,
            bucket.total_with_date,
            bucket.unavailable,
            fmt6(bucket.share)
        );
    }
    out
}

pub fn reason_csv(tally: &ReasonTally) -> String {
    let mut out = String::from(REASON_HEADER);
    out.push('\n');
    for (reason, count, share) in tally.rows() {
        let _ = writeln!(out, "{reason},{count},{}", fmt6(share));
    }
    out
}

/// One risk row per publication.
#[derive(Debug, Clone)]
pub struct RiskRow {
    pub publication_id: String,
    pub summary: RiskSummary,
    pub worst: WorstCase,
}

pub fn risk_csv(rows: &[RiskRow]) -> String {
    let mut out = String::from(RISK_HEADER);
    out.push('\n');
    for row in rows {
        let s = &row.summary;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&row.publication_id),
            fmt6(s.mean),
            fmt6(s.p50),
            fmt6(s.p90),
            fmt6(s.p99),
            fmt6(s.max),
            row.worst.event.kind_name(),
            csv_field(row.worst.event.target()),
            fmt6(row.worst.loss),
        );
    }
    out
}

pub fn pdf_ccdf_csv(rows: &[(u64, f64, f64)]) -> String {
    let mut out = String::from(PDF_CCDF_HEADER);
    out.push('\n');
    for &(value, pdf, ccdf) in rows {
        let _ = writeln!(out, "{value},{},{}", fmt6(pdf), fmt6(ccdf));
    }
    out
}

/// Writes a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or_else(|| Path::new(".")))?;
    io::Write::write_all(&mut tmp, contents)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
