//! Per-publication dissemination indicators.
//!
//! Two numbers summarize a structure: originality (share of recorded mentions
//! that are originals) and concentration (largest share of retweets attached
//! to any single original node). Assumed originals never count toward mention
//! totals, but they do act as concentration buckets — the retweets hanging
//! off them are real and vanish together.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Corpus, PublicationId, Snapshot};
use crate::structure::DisseminationStructure;

/// Median-split class in the originality x concentration plane.
///
/// A: high/high, B: low originality / high concentration, C: low/low,
/// D: high originality / low concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Quadrant {
    A,
    B,
    C,
    D,
}

impl std::fmt::Display for Quadrant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Quadrant::A => "A",
            Quadrant::B => "B",
            Quadrant::C => "C",
            Quadrant::D => "D",
        };
        f.write_str(s)
    }
}

/// Mention counts of one publication (recorded mentions only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TweetCounts {
    /// Total recorded mentions (the TWS indicator).
    pub total_mentions: u64,
    /// Distinct non-null authors (the NUTU indicator).
    pub unique_users: u64,
    /// Recorded originals.
    pub originals: u64,
    /// Recorded retweets.
    pub retweets: u64,
}

/// Indicator set for one publication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureMetrics {
    pub publication_id: PublicationId,
    pub total_mentions: u64,
    pub unique_users: u64,
    pub originals: u64,
    pub retweets: u64,
    /// Degree of originality, in [0, 1].
    pub originality: f64,
    /// Degree of concentration, in [0, 1].
    pub concentration: f64,
    pub quadrant: Option<Quadrant>,
}

/// Decomposition of a publication's unavailable mentions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct UnavailabilityBreakdown {
    /// Unavailable recorded mentions (N_UnT).
    pub unavailable_total: u64,
    /// Unavailability rate TUnR = unavailable_total / total recorded.
    pub unavailability_rate: f64,
    /// Unavailable recorded originals (N_UnOT).
    pub unavailable_originals: u64,
    /// Unavailable retweets (N_UnRT).
    pub unavailable_retweets: u64,
    /// Most unavailable retweets attached to a single original node,
    /// assumed nodes included (Max(N_UnRT)).
    pub max_unavailable_single_original: u64,
}

/// Corpus-level median split points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Medians {
    pub originality: f64,
    pub concentration: f64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("publication has no recorded mentions")]
    EmptyPublication,
    #[error("no publications to take medians over")]
    EmptyCorpus,
}

/// Counts recorded mentions and distinct users for a built structure.
pub fn tweet_counts(structure: &DisseminationStructure, corpus: &Corpus) -> TweetCounts {
    TweetCounts {
        total_mentions: structure.total_recorded(),
        unique_users: corpus.unique_users(&structure.publication_id),
        originals: structure.recorded_original_count(),
        retweets: structure.retweet_count(),
    }
}

/// Share of recorded mentions that are originals.
pub fn degree_of_originality(structure: &DisseminationStructure) -> Result<f64, MetricsError> {
    let total = structure.total_recorded();
    if total == 0 {
        return Err(MetricsError::EmptyPublication);
    }
    Ok(structure.recorded_original_count() as f64 / total as f64)
}

/// Largest share of retweets attached to any single original node.
///
/// Zero by default when the publication has no retweets.
pub fn degree_of_concentration(structure: &DisseminationStructure) -> f64 {
    let retweets = structure.retweet_count();
    if retweets == 0 {
        return 0.0;
    }
    let max_children = structure
        .originals
        .iter()
        .map(|n| n.retweet_children.len() as u64)
        .max()
        .unwrap_or(0);
    max_children as f64 / retweets as f64
}

/// Metrics of one publication, quadrant left unassigned.
pub fn compute_metrics(
    structure: &DisseminationStructure,
    corpus: &Corpus,
) -> Result<StructureMetrics, MetricsError> {
    let counts = tweet_counts(structure, corpus);
    Ok(StructureMetrics {
        publication_id: structure.publication_id.clone(),
        total_mentions: counts.total_mentions,
        unique_users: counts.unique_users,
        originals: counts.originals,
        retweets: counts.retweets,
        originality: degree_of_originality(structure)?,
        concentration: degree_of_concentration(structure),
        quadrant: None,
    })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Median originality and concentration over a set of publications.
pub fn corpus_medians(metrics: &[StructureMetrics]) -> Result<Medians, MetricsError> {
    if metrics.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let mut originality: Vec<f64> = metrics.iter().map(|m| m.originality).collect();
    let mut concentration: Vec<f64> = metrics.iter().map(|m| m.concentration).collect();
    originality.sort_unstable_by(f64::total_cmp);
    concentration.sort_unstable_by(f64::total_cmp);
    Ok(Medians {
        originality: median(&originality),
        concentration: median(&concentration),
    })
}

/// Assigns the median-split quadrant; boundary ties go to the high side.
pub fn classify_quadrant(
    originality: f64,
    concentration: f64,
    median_originality: f64,
    median_concentration: f64,
) -> Quadrant {
    let high_originality = originality >= median_originality;
    let high_concentration = concentration >= median_concentration;
    match (high_originality, high_concentration) {
        (true, true) => Quadrant::A,
        (false, true) => Quadrant::B,
        (false, false) => Quadrant::C,
        (true, false) => Quadrant::D,
    }
}

/// Counts a publication's unavailable mentions against a snapshot.
///
/// Recorded mentions missing from the snapshot count as available. The
/// per-node maximum includes assumed nodes: their retweets are recorded
/// mentions even though the node itself is not.
pub fn unavailability_breakdown(
    structure: &DisseminationStructure,
    snapshot: &Snapshot,
) -> UnavailabilityBreakdown {
    let mut unavailable_originals = 0u64;
    let mut unavailable_retweets = 0u64;
    let mut max_single = 0u64;
    for node in &structure.originals {
        if !node.is_assumed() && snapshot.is_unavailable(&node.tweet_id) {
            unavailable_originals += 1;
        }
        let here = node
            .retweet_children
            .iter()
            .filter(|id| snapshot.is_unavailable(id))
            .count() as u64;
        unavailable_retweets += here;
        max_single = max_single.max(here);
    }
    let unavailable_total = unavailable_originals + unavailable_retweets;
    let total = structure.total_recorded();
    UnavailabilityBreakdown {
        unavailable_total,
        unavailability_rate: if total == 0 {
            0.0
        } else {
            unavailable_total as f64 / total as f64
        },
        unavailable_originals,
        unavailable_retweets,
        max_unavailable_single_original: max_single,
    }
}
