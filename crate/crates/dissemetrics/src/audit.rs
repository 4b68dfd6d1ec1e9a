//! Batch availability checking against a pluggable status source.
//!
//! A [`StatusSource`] answers lookups for batches of at most 100 tweet ids
//! and may throttle; the auditor retries each batch with bounded exponential
//! backoff and assembles a deterministic snapshot regardless of how many
//! batches were in flight. Live network adapters are out of scope — the
//! bundled [`FileSource`] replays a `statuses.jsonl` fixture.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use chrono::{DateTime, Datelike, Utc};
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    self, Corpus, Reason, Snapshot, StatusRecord, TweetId,
};

/// Environment variable bounding concurrent lookup batches.
pub const MAX_INFLIGHT_ENV: &str = "CASCADE_MAX_INFLIGHT";
/// Hard per-call id limit of the lookup contract.
pub const BATCH_SIZE: usize = 100;

/// Verdict for a single tweet id: available, or an error code to classify.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LookupVerdict {
    Available,
    ErrorCode(i64),
}

/// Transient lookup failure; the auditor retries these.
#[derive(Debug, Error)]
#[error("status source failure: {0}")]
pub struct SourceError(pub String);

/// A source of availability verdicts.
///
/// `lookup` receives at most [`BATCH_SIZE`] ids and must answer one verdict
/// per id, in order. Implementations must tolerate concurrent calls and be
/// idempotent within one audit run.
pub trait StatusSource: Sync {
    fn lookup(&self, batch: &[TweetId]) -> Result<Vec<LookupVerdict>, SourceError>;
}

/// Verdict fixture backed by a `statuses.jsonl` file.
///
/// Ids absent from the fixture are reported available: the fixture only
/// asserts what a recheck observed.
#[derive(Debug, Default)]
pub struct FileSource {
    verdicts: HashMap<TweetId, LookupVerdict>,
}

impl FileSource {
    pub fn from_reader<R: BufRead>(reader: R) -> std::io::Result<FileSource> {
        let (snapshot, _) = model::ingest_statuses(reader)?;
        Ok(FileSource::from_snapshot(&snapshot))
    }

    pub fn from_snapshot(snapshot: &Snapshot) -> FileSource {
        let verdicts = snapshot
            .iter()
            .map(|rec| {
                let verdict = if rec.is_unavailable() {
                    LookupVerdict::ErrorCode(rec.error_code.unwrap_or(0))
                } else {
                    LookupVerdict::Available
                };
                (rec.tweet_id.clone(), verdict)
            })
            .collect();
        FileSource { verdicts }
    }

    pub fn len(&self) -> usize {
        self.verdicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verdicts.is_empty()
    }
}

impl StatusSource for FileSource {
    fn lookup(&self, batch: &[TweetId]) -> Result<Vec<LookupVerdict>, SourceError> {
        Ok(batch
            .iter()
            .map(|id| self.verdicts.get(id).copied().unwrap_or(LookupVerdict::Available))
            .collect())
    }
}

/// Tuning for one audit run.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub batch_size: usize,
    /// Attempts per batch before it is declared unresolved.
    pub max_attempts: u32,
    /// First retry delay; doubles per attempt.
    pub base_backoff: Duration,
    /// Upper bound on concurrently issued batches.
    pub max_inflight: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            batch_size: BATCH_SIZE,
            max_attempts: 3,
            base_backoff: Duration::from_millis(100),
            max_inflight: 4,
        }
    }
}

impl AuditConfig {
    /// Default config with `max_inflight` taken from `CASCADE_MAX_INFLIGHT`.
    pub fn from_env() -> AuditConfig {
        let mut config = AuditConfig::default();
        if let Some(n) = std::env::var(MAX_INFLIGHT_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
        {
            config.max_inflight = n.max(1);
        }
        config
    }
}

#[derive(Debug, Error)]
pub enum AuditError {
    /// Some batches exhausted their retries; the partial snapshot and the
    /// unresolved ids are returned so the caller can decide how to proceed.
    #[error("{} tweet ids unresolved after retries", unresolved.len())]
    Unresolved {
        snapshot: Snapshot,
        unresolved: Vec<TweetId>,
    },
}

/// Checks every id against the source and assembles a snapshot.
///
/// Batches are issued concurrently up to `max_inflight`, but assembly merges
/// them in batch order, so the result is identical however work interleaves.
pub fn audit<S: StatusSource + ?Sized>(
    ids: &[TweetId],
    source: &S,
    checked_at: DateTime<Utc>,
    config: &AuditConfig,
) -> Result<Snapshot, AuditError> {
    let batch_size = config.batch_size.clamp(1, BATCH_SIZE);
    let batches: Vec<&[TweetId]> = ids.chunks(batch_size).collect();
    let results = run_batches(&batches, source, config);

    let mut snapshot = Snapshot::new();
    let mut unresolved = Vec::new();
    for (batch, verdicts) in batches.iter().zip(results) {
        match verdicts {
            Some(verdicts) if verdicts.len() == batch.len() => {
                for (id, verdict) in batch.iter().zip(verdicts) {
                    snapshot.insert_latest(match verdict {
                        LookupVerdict::Available => StatusRecord::available(id.clone(), checked_at),
                        LookupVerdict::ErrorCode(code) => {
                            StatusRecord::unavailable(id.clone(), code, checked_at)
                        }
                    });
                }
            }
            // A short verdict vector violates the source contract; the whole
            // batch is treated as unresolved rather than misattributed.
            _ => unresolved.extend(batch.iter().cloned()),
        }
    }
    if unresolved.is_empty() {
        Ok(snapshot)
    } else {
        Err(AuditError::Unresolved { snapshot, unresolved })
    }
}

type BatchResult = Option<Vec<LookupVerdict>>;

fn run_batches<S: StatusSource + ?Sized>(
    batches: &[&[TweetId]],
    source: &S,
    config: &AuditConfig,
) -> Vec<BatchResult> {
    let workers = config.max_inflight.max(1).min(batches.len().max(1));
    if workers <= 1 {
        return batches
            .iter()
            .map(|batch| lookup_with_retry(source, batch, config))
            .collect();
    }
    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![None; batches.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= batches.len() {
                    break;
                }
                let outcome = lookup_with_retry(source, batches[index], config);
                results.lock().unwrap()[index] = outcome;
            });
        }
    });
    results.into_inner().unwrap()
}

fn lookup_with_retry<S: StatusSource + ?Sized>(
    source: &S,
    batch: &[TweetId],
    config: &AuditConfig,
) -> BatchResult {
    let attempts = config.max_attempts.max(1);
    for attempt in 0..attempts {
        match source.lookup(batch) {
            Ok(verdicts) => return Some(verdicts),
            Err(_) if attempt + 1 < attempts => {
                let delay = config.base_backoff * 2u32.saturating_pow(attempt);
                if !delay.is_zero() {
                    std::thread::sleep(delay);
                }
            }
            Err(_) => return None,
        }
    }
    None
}

/// Classifies a status-source error code.
///
/// Deleted and page-not-found tweets are unrecoverable; suspended and
/// protected ones may come back.
pub fn classify_error(code: i64) -> Reason {
    Reason::from_error_code(code)
}

/// Counts of unavailable records by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReasonTally {
    counts: Vec<(Reason, u64)>,
    total: u64,
}

impl ReasonTally {
    pub fn count(&self, reason: Reason) -> u64 {
        self.counts
            .iter()
            .find(|(r, _)| *r == reason)
            .map_or(0, |(_, n)| *n)
    }

    /// Share of `reason` among unavailable records; zero when nothing is
    /// unavailable.
    pub fn share(&self, reason: Reason) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(reason) as f64 / self.total as f64
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Rows in canonical reason order.
    pub fn rows(&self) -> impl Iterator<Item = (Reason, u64, f64)> + '_ {
        Reason::ALL
            .iter()
            .map(|&r| (r, self.count(r), self.share(r)))
    }
}

/// Tallies unavailability reasons over a snapshot's unavailable records.
pub fn reason_distribution(snapshot: &Snapshot) -> ReasonTally {
    let mut counts: Vec<(Reason, u64)> = Reason::ALL.iter().map(|&r| (r, 0)).collect();
    let mut total = 0u64;
    for record in snapshot.unavailable() {
        let reason = record.reason.unwrap_or(Reason::Other);
        counts.iter_mut().find(|(r, _)| *r == reason).unwrap().1 += 1;
        total += 1;
    }
    ReasonTally { counts, total }
}

/// One calendar-year bucket of the unavailability timeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct YearBucket {
    pub total_with_date: u64,
    pub unavailable: u64,
    pub share: f64,
}

/// Calendar-year (UTC) distribution of mentions and their unavailability.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct YearlyDistribution {
    pub years: std::collections::BTreeMap<i32, YearBucket>,
    /// Mentions with no posting date; excluded from the buckets.
    pub undated: u64,
}

/// Buckets a corpus's mentions by posting year against a snapshot.
pub fn yearly_distribution(corpus: &Corpus, snapshot: &Snapshot) -> YearlyDistribution {
    let mut dist = YearlyDistribution::default();
    for mention in corpus.mentions() {
        match mention.posted_at {
            None => dist.undated += 1,
            Some(ts) => {
                let bucket = dist.years.entry(ts.year()).or_default();
                bucket.total_with_date += 1;
                if snapshot.is_unavailable(&mention.tweet_id) {
                    bucket.unavailable += 1;
                }
            }
        }
    }
    for bucket in dist.years.values_mut() {
        bucket.share = if bucket.total_with_date == 0 {
            0.0
        } else {
            bucket.unavailable as f64 / bucket.total_with_date as f64
        };
    }
    dist
}
