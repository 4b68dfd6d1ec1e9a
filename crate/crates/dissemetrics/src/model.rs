//! Canonical domain types plus streaming ingestion of mention and status dumps.
//!
//! Mention dumps arrive as line-delimited JSON (`mentions.jsonl`), one record
//! per tweet that mentioned a publication. Status dumps (`statuses.jsonl`)
//! carry availability verdicts from a recheck run. Ingestion is single-pass,
//! never aborts on a bad line, and accounts for every line it saw in an
//! [`IngestReport`].

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

/// Opaque tweet identifier, unique per corpus.
pub type TweetId = String;
/// Opaque publication identifier (an aggregator's paper id).
pub type PublicationId = String;
/// Opaque tweet-author identifier.
pub type AuthorId = String;

/// Whether a mention was posted directly or re-shared an existing tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MentionKind {
    Original,
    Retweet,
}

/// One recorded tweet-mention of a publication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionRecord {
    pub tweet_id: TweetId,
    pub publication_id: PublicationId,
    pub author_id: Option<AuthorId>,
    pub posted_at: Option<DateTime<Utc>>,
    pub kind: MentionKind,
    /// Root original named by a retweet; absent for originals and orphans.
    pub parent_tweet_id: Option<TweetId>,
}

impl MentionRecord {
    pub fn is_retweet(&self) -> bool {
        self.kind == MentionKind::Retweet
    }
}

/// Availability verdict for a tweet id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Availability {
    Available,
    Unavailable,
}

/// Why a tweet is unavailable.
///
/// The variant order is the canonical report order. `Deleted` and
/// `PageNotFound` are irreversible: the underlying tweet id no longer exists.
/// `Suspended` and `Protected` may revert if the account is unlocked or the
/// user lifts protection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    Deleted,
    Suspended,
    Protected,
    PageNotFound,
    Other,
}

impl Reason {
    /// Maps a status-source error code onto a reason.
    ///
    /// 144 -> Deleted, 63 -> Suspended, 179 -> Protected, 34 -> PageNotFound;
    /// every other code maps to Other.
    pub fn from_error_code(code: i64) -> Reason {
        match code {
            144 => Reason::Deleted,
            63 => Reason::Suspended,
            179 => Reason::Protected,
            34 => Reason::PageNotFound,
            _ => Reason::Other,
        }
    }

    /// True when the unavailability can still revert (suspension lifted or
    /// protection cancelled).
    pub fn is_reversible(self) -> bool {
        matches!(self, Reason::Suspended | Reason::Protected)
    }

    pub const ALL: [Reason; 5] = [
        Reason::Deleted,
        Reason::Suspended,
        Reason::Protected,
        Reason::PageNotFound,
        Reason::Other,
    ];
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::Deleted => "deleted",
            Reason::Suspended => "suspended",
            Reason::Protected => "protected",
            Reason::PageNotFound => "page_not_found",
            Reason::Other => "other",
        };
        f.write_str(s)
    }
}

/// Availability verdict for one tweet id at a check time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusRecord {
    pub tweet_id: TweetId,
    pub availability: Availability,
    pub reason: Option<Reason>,
    pub error_code: Option<i64>,
    pub checked_at: DateTime<Utc>,
}

impl StatusRecord {
    pub fn available(tweet_id: impl Into<TweetId>, checked_at: DateTime<Utc>) -> StatusRecord {
        StatusRecord {
            tweet_id: tweet_id.into(),
            availability: Availability::Available,
            reason: None,
            error_code: None,
            checked_at,
        }
    }

    /// Builds an unavailable verdict; the reason is derived from the code.
    pub fn unavailable(
        tweet_id: impl Into<TweetId>,
        error_code: i64,
        checked_at: DateTime<Utc>,
    ) -> StatusRecord {
        StatusRecord {
            tweet_id: tweet_id.into(),
            availability: Availability::Unavailable,
            reason: Some(Reason::from_error_code(error_code)),
            error_code: Some(error_code),
            checked_at,
        }
    }

    pub fn is_unavailable(&self) -> bool {
        self.availability == Availability::Unavailable
    }
}

/// Latest-wins set of availability verdicts keyed by tweet id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Snapshot {
    records: BTreeMap<TweetId, StatusRecord>,
}

impl Snapshot {
    pub fn new() -> Snapshot {
        Snapshot::default()
    }

    /// Inserts a verdict keeping the later `checked_at`; on equal timestamps
    /// the incoming record wins (later line wins).
    pub fn insert_latest(&mut self, record: StatusRecord) {
        use std::collections::btree_map::Entry;
        match self.records.entry(record.tweet_id.clone()) {
            Entry::Vacant(slot) => {
                slot.insert(record);
            }
            Entry::Occupied(mut slot) => {
                if record.checked_at >= slot.get().checked_at {
                    slot.insert(record);
                }
            }
        }
    }

    pub fn get(&self, tweet_id: &str) -> Option<&StatusRecord> {
        self.records.get(tweet_id)
    }

    /// Tweets absent from the snapshot count as available: the recheck only
    /// asserts what it observed.
    pub fn is_unavailable(&self, tweet_id: &str) -> bool {
        self.get(tweet_id).is_some_and(StatusRecord::is_unavailable)
    }

    pub fn reason_of(&self, tweet_id: &str) -> Option<Reason> {
        self.get(tweet_id).and_then(|r| r.reason)
    }

    pub fn iter(&self) -> impl Iterator<Item = &StatusRecord> {
        self.records.values()
    }

    pub fn unavailable(&self) -> impl Iterator<Item = &StatusRecord> {
        self.records.values().filter(|r| r.is_unavailable())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the snapshot in the `statuses.jsonl` wire format. The derived
    /// reason is never written; it is re-derived from the error code on read.
    pub fn to_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for record in self.records.values() {
            let line = StatusLine {
                tweet_id: record.tweet_id.clone(),
                status: record.availability,
                error_code: record.error_code,
                checked_at: format_utc(record.checked_at),
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Snapshot {
    type Item = &'a StatusRecord;
    type IntoIter = std::collections::btree_map::Values<'a, TweetId, StatusRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.records.values()
    }
}

/// Why a decoded mention record was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RejectReason {
    MissingTweetId,
    MissingPublicationId,
    BadKind,
    OriginalWithParent,
    SelfParent,
}

impl RejectReason {
    /// Machine-readable token used in reports.
    pub fn token(self) -> &'static str {
        match self {
            RejectReason::MissingTweetId => "missing_tweet_id",
            RejectReason::MissingPublicationId => "missing_publication_id",
            RejectReason::BadKind => "bad_kind",
            RejectReason::OriginalWithParent => "original_with_parent",
            RejectReason::SelfParent => "self_parent",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One decoded `mentions.jsonl` line before validation.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct RawMention {
    #[serde(default)]
    pub tweet_id: Option<String>,
    #[serde(default)]
    pub publication_id: Option<String>,
    #[serde(default)]
    pub author_id: Option<String>,
    #[serde(default)]
    pub posted_at: Option<String>,
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub parent_tweet_id: Option<String>,
}

/// Outcome of validating one raw record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedMention {
    pub record: MentionRecord,
    /// Set when `posted_at` was present but unparseable; the record is kept
    /// with the timestamp dropped.
    pub timestamp_dropped: bool,
}

fn non_empty(value: Option<String>) -> Option<String> {
    value.filter(|s| !s.is_empty())
}

/// Checks one decoded record against the mention invariants.
///
/// Timestamps are normalized to UTC; an unparseable `posted_at` keeps the
/// record and drops the timestamp (reported via `timestamp_dropped`).
pub fn validate_record(raw: RawMention) -> Result<ValidatedMention, RejectReason> {
    let tweet_id = non_empty(raw.tweet_id).ok_or(RejectReason::MissingTweetId)?;
    let publication_id =
        non_empty(raw.publication_id).ok_or(RejectReason::MissingPublicationId)?;
    let kind = match raw.kind.as_deref() {
        Some("original") => MentionKind::Original,
        Some("retweet") => MentionKind::Retweet,
        _ => return Err(RejectReason::BadKind),
    };
    let parent_tweet_id = non_empty(raw.parent_tweet_id);
    if kind == MentionKind::Original && parent_tweet_id.is_some() {
        return Err(RejectReason::OriginalWithParent);
    }
    if parent_tweet_id.as_deref() == Some(tweet_id.as_str()) {
        return Err(RejectReason::SelfParent);
    }

    let mut timestamp_dropped = false;
    let posted_at = match non_empty(raw.posted_at) {
        None => None,
        Some(text) => match parse_utc(&text) {
            Some(ts) => Some(ts),
            None => {
                timestamp_dropped = true;
                None
            }
        },
    };

    Ok(ValidatedMention {
        record: MentionRecord {
            tweet_id,
            publication_id,
            author_id: non_empty(raw.author_id),
            posted_at,
            kind,
            parent_tweet_id,
        },
        timestamp_dropped,
    })
}

pub(crate) fn parse_utc(text: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|dt| dt.with_timezone(&Utc))
}

pub(crate) fn format_utc(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Counters accounting for every line seen by `ingest_mentions`.
///
/// `records_read` covers lines that decoded into a record and equals
/// `accepted + rejected + duplicates`; lines that did not decode at all are
/// counted in `unreadable_lines`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records_read: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub duplicates: u64,
    pub unreadable_lines: u64,
    pub orphan_retweets: u64,
    pub missing_authors: u64,
    pub missing_timestamps: u64,
    /// Records kept with an unparseable timestamp dropped.
    pub bad_timestamps: u64,
    /// Duplicate tweet ids that tried to bind a second publication.
    pub cross_publication_duplicates: u64,
    pub rejected_by_reason: BTreeMap<String, u64>,
}

/// Immutable in-memory mention corpus: records keyed by tweet id plus a
/// publication index. Safe to share across concurrent readers.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    mentions: HashMap<TweetId, MentionRecord>,
    publications: BTreeMap<PublicationId, Vec<TweetId>>,
    report: IngestReport,
}

impl Corpus {
    pub fn mention(&self, tweet_id: &str) -> Option<&MentionRecord> {
        self.mentions.get(tweet_id)
    }

    pub fn contains(&self, tweet_id: &str) -> bool {
        self.mentions.contains_key(tweet_id)
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }

    pub fn mentions(&self) -> impl Iterator<Item = &MentionRecord> {
        self.mentions.values()
    }

    pub fn publication_ids(&self) -> impl Iterator<Item = &str> {
        self.publications.keys().map(String::as_str)
    }

    pub fn publication_count(&self) -> usize {
        self.publications.len()
    }

    /// Tweet ids of one publication, sorted ascending.
    pub fn publication_tweets(&self, publication_id: &str) -> Option<&[TweetId]> {
        self.publications.get(publication_id).map(Vec::as_slice)
    }

    /// All tweet ids in the corpus, sorted ascending.
    pub fn tweet_ids(&self) -> Vec<TweetId> {
        let mut ids: Vec<TweetId> = self.mentions.keys().cloned().collect();
        ids.sort_unstable();
        ids
    }

    pub fn report(&self) -> &IngestReport {
        &self.report
    }

    /// Distinct non-null authors over one publication's recorded mentions.
    pub fn unique_users(&self, publication_id: &str) -> u64 {
        let Some(tweets) = self.publications.get(publication_id) else {
            return 0;
        };
        let mut authors = BTreeSet::new();
        for id in tweets {
            if let Some(author) = self.mentions[id].author_id.as_deref() {
                authors.insert(author);
            }
        }
        authors.len() as u64
    }

    /// Writes the corpus back out in the `mentions.jsonl` wire format,
    /// publications and tweet ids in sorted order.
    pub fn to_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for tweets in self.publications.values() {
            for id in tweets {
                let record = &self.mentions[id];
                let line = MentionLine {
                    tweet_id: record.tweet_id.clone(),
                    publication_id: record.publication_id.clone(),
                    author_id: record.author_id.clone(),
                    posted_at: record.posted_at.map(format_utc),
                    kind: record.kind,
                    parent_tweet_id: record.parent_tweet_id.clone(),
                };
                serde_json::to_writer(&mut out, &line)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

/// Equality over contents only; ingestion counters are provenance, not data.
impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.mentions == other.mentions && self.publications == other.publications
    }
}

impl Eq for Corpus {}

#[derive(Serialize)]
struct MentionLine {
    tweet_id: String,
    publication_id: String,
    author_id: Option<String>,
    posted_at: Option<String>,
    kind: MentionKind,
    parent_tweet_id: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct RawStatus {
    #[serde(default)]
    tweet_id: Option<String>,
    #[serde(default)]
    status: Option<Availability>,
    #[serde(default)]
    error_code: Option<i64>,
    #[serde(default)]
    checked_at: Option<String>,
}

#[derive(Serialize)]
struct StatusLine {
    tweet_id: String,
    status: Availability,
    error_code: Option<i64>,
    checked_at: String,
}

/// Counters for one `ingest_statuses` pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatusIngestReport {
    pub records_read: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub unreadable_lines: u64,
    /// Unavailable records whose error code was absent or outside the known
    /// taxonomy; coerced to reason `other`.
    pub unknown_codes: u64,
}

/// Streams line-delimited mention records into a [`Corpus`].
///
/// Single pass; a line that fails to decode is counted and skipped, a record
/// whose tweet id was already seen keeps the first occurrence. Memory is
/// proportional to accepted records. Only genuine I/O failures abort.
pub fn ingest_mentions<R: BufRead>(mut input: R) -> io::Result<Corpus> {
    let mut corpus = Corpus::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if input.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        let line = trim_line(&buf);
        if line.is_empty() {
            continue;
        }
        let raw: RawMention = match serde_json::from_slice(line) {
            Ok(raw) => raw,
            Err(_) => {
                corpus.report.unreadable_lines += 1;
                continue;
            }
        };
        corpus.report.records_read += 1;
        let validated = match validate_record(raw) {
            Ok(v) => v,
            Err(reason) => {
                corpus.report.rejected += 1;
                *corpus
                    .report
                    .rejected_by_reason
                    .entry(reason.token().to_string())
                    .or_insert(0) += 1;
                continue;
            }
        };
        let record = validated.record;
        match corpus.mentions.entry(record.tweet_id.clone()) {
            Entry::Occupied(existing) => {
                corpus.report.duplicates += 1;
                if existing.get().publication_id != record.publication_id {
                    corpus.report.cross_publication_duplicates += 1;
                }
            }
            Entry::Vacant(slot) => {
                corpus.report.accepted += 1;
                if validated.timestamp_dropped {
                    corpus.report.bad_timestamps += 1;
                }
                if record.posted_at.is_none() {
                    corpus.report.missing_timestamps += 1;
                }
                if record.author_id.is_none() {
                    corpus.report.missing_authors += 1;
                }
                if record.is_retweet() && record.parent_tweet_id.is_none() {
                    corpus.report.orphan_retweets += 1;
                }
                corpus
                    .publications
                    .entry(record.publication_id.clone())
                    .or_default()
                    .push(record.tweet_id.clone());
                slot.insert(record);
            }
        }
    }
    for tweets in corpus.publications.values_mut() {
        tweets.sort_unstable();
    }
    Ok(corpus)
}

/// Streams line-delimited status records into a latest-wins [`Snapshot`].
pub fn ingest_statuses<R: BufRead>(mut input: R) -> io::Result<(Snapshot, StatusIngestReport)> {
    let mut snapshot = Snapshot::new();
    let mut report = StatusIngestReport::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if input.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        let line = trim_line(&buf);
        if line.is_empty() {
            continue;
        }
        let raw: RawStatus = match serde_json::from_slice(line) {
            Ok(raw) => raw,
            Err(_) => {
                report.unreadable_lines += 1;
                continue;
            }
        };
        report.records_read += 1;
        let (Some(tweet_id), Some(status), Some(checked_at)) = (
            non_empty(raw.tweet_id),
            raw.status,
            raw.checked_at.as_deref().and_then(parse_utc),
        ) else {
            report.rejected += 1;
            continue;
        };
        report.accepted += 1;
        let record = match status {
            // An available verdict carries no reason or code; stray codes on
            // available lines are dropped, never read.
            Availability::Available => StatusRecord::available(tweet_id, checked_at),
            Availability::Unavailable => {
                let reason = match raw.error_code {
                    Some(code) => {
                        let reason = Reason::from_error_code(code);
                        if reason == Reason::Other {
                            report.unknown_codes += 1;
                        }
                        reason
                    }
                    None => {
                        report.unknown_codes += 1;
                        Reason::Other
                    }
                };
                StatusRecord {
                    tweet_id,
                    availability: Availability::Unavailable,
                    reason: Some(reason),
                    error_code: raw.error_code,
                    checked_at,
                }
            }
        };
        snapshot.insert_latest(record);
    }
    Ok((snapshot, report))
}

fn trim_line(buf: &[u8]) -> &[u8] {
    let mut line = buf;
    while let Some((last, rest)) = line.split_last() {
        if matches!(last, b'\n' | b'\r' | b' ' | b'\t') {
            line = rest;
        } else {
            break;
        }
    }
    line
}

/// Publications whose unique-user count reaches `min_nutu` ("at least"
/// semantics, threshold inclusive).
pub fn select_highly_tweeted(corpus: &Corpus, min_nutu: u64) -> BTreeSet<PublicationId> {
    corpus
        .publications
        .keys()
        .filter(|id| corpus.unique_users(id) >= min_nutu)
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn raw(json: &str) -> RawMention {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn minimal_valid_record_accepted() {
        let v = validate_record(raw(
            r#"{"tweet_id":"t1","publication_id":"p1","kind":"original"}"#,
        ))
        .unwrap();
        assert_eq!(v.record.tweet_id, "t1");
        assert_eq!(v.record.kind, MentionKind::Original);
        assert!(v.record.parent_tweet_id.is_none());
        assert!(!v.timestamp_dropped);
    }

    #[test]
    fn original_with_parent_rejected() {
        let err = validate_record(raw(
            r#"{"tweet_id":"t2","publication_id":"p1","kind":"original","parent_tweet_id":"t1"}"#,
        ))
        .unwrap_err();
        assert_eq!(err, RejectReason::OriginalWithParent);
        assert_eq!(err.token(), "original_with_parent");
    }

    #[test]
    fn self_parent_rejected() {
        let err = validate_record(raw(
            r#"{"tweet_id":"t3","publication_id":"p1","kind":"retweet","parent_tweet_id":"t3"}"#,
        ))
        .unwrap_err();
        assert_eq!(err, RejectReason::SelfParent);
    }

    #[test]
    fn missing_fields_and_bad_kind_rejected() {
        assert_eq!(
            validate_record(raw(r#"{"publication_id":"p1","kind":"original"}"#)).unwrap_err(),
            RejectReason::MissingTweetId
        );
        assert_eq!(
            validate_record(raw(r#"{"tweet_id":"t1","kind":"original"}"#)).unwrap_err(),
            RejectReason::MissingPublicationId
        );
        assert_eq!(
            validate_record(raw(r#"{"tweet_id":"t1","publication_id":"p1","kind":"reply"}"#))
                .unwrap_err(),
            RejectReason::BadKind
        );
    }

    #[test]
    fn unparseable_timestamp_kept_with_drop_flag() {
        let v = validate_record(raw(
            r#"{"tweet_id":"t1","publication_id":"p1","kind":"original","posted_at":"yesterday"}"#,
        ))
        .unwrap();
        assert!(v.timestamp_dropped);
        assert!(v.record.posted_at.is_none());
    }

    #[test]
    fn timestamps_normalized_to_utc() {
        let v = validate_record(raw(
            r#"{"tweet_id":"t1","publication_id":"p1","kind":"original","posted_at":"2016-05-01T12:00:00+02:00"}"#,
        ))
        .unwrap();
        assert_eq!(format_utc(v.record.posted_at.unwrap()), "2016-05-01T10:00:00Z");
    }

    #[test]
    fn duplicate_ids_keep_first_occurrence() {
        let input = "\
{\"tweet_id\":\"t1\",\"publication_id\":\"p1\",\"kind\":\"original\"}
{\"tweet_id\":\"t2\",\"publication_id\":\"p1\",\"kind\":\"retweet\",\"parent_tweet_id\":\"t1\"}
{\"tweet_id\":\"t3\",\"publication_id\":\"p2\",\"kind\":\"original\"}
{\"tweet_id\":\"t1\",\"publication_id\":\"p2\",\"kind\":\"original\"}
";
        let corpus = ingest_mentions(Cursor::new(input)).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.report().duplicates, 1);
        assert_eq!(corpus.report().cross_publication_duplicates, 1);
        assert_eq!(corpus.mention("t1").unwrap().publication_id, "p1");
    }

    #[test]
    fn empty_input_gives_empty_corpus() {
        let corpus = ingest_mentions(Cursor::new("")).unwrap();
        assert!(corpus.is_empty());
        assert_eq!(*corpus.report(), IngestReport::default());
    }

    #[test]
    fn unreadable_lines_counted_and_skipped() {
        let input = "\
{\"tweet_id\":\"t1\",\"publication_id\":\"p1\",\"kind\":\"original\"}
not json at all
{\"tweet_id\":42,\"publication_id\":\"p1\",\"kind\":\"original\"}
{\"tweet_id\":\"t2\",\"publication_id\":\"p1\",\"kind\":\"original\"}
";
        let corpus = ingest_mentions(Cursor::new(input)).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.report().unreadable_lines, 2);
        assert_eq!(corpus.report().records_read, 2);
    }

    #[test]
    fn report_counters_balance() {
        let input = "\
{\"tweet_id\":\"t1\",\"publication_id\":\"p1\",\"kind\":\"original\"}
{\"tweet_id\":\"t1\",\"publication_id\":\"p1\",\"kind\":\"original\"}
{\"tweet_id\":\"\",\"publication_id\":\"p1\",\"kind\":\"original\"}
{\"tweet_id\":\"t2\",\"publication_id\":\"p1\",\"kind\":\"retweet\"}
";
        let report = ingest_mentions(Cursor::new(input)).unwrap().report().clone();
        assert_eq!(report.records_read, 4);
        assert_eq!(
            report.records_read,
            report.accepted + report.rejected + report.duplicates
        );
        assert_eq!(report.orphan_retweets, 1);
        assert_eq!(report.rejected_by_reason["missing_tweet_id"], 1);
    }

    #[test]
    fn latest_checked_at_wins() {
        let input = "\
{\"tweet_id\":\"t1\",\"status\":\"unavailable\",\"error_code\":144,\"checked_at\":\"2019-04-01T00:00:00Z\"}
{\"tweet_id\":\"t1\",\"status\":\"available\",\"error_code\":null,\"checked_at\":\"2019-04-02T00:00:00Z\"}
";
        let (snapshot, _) = ingest_statuses(Cursor::new(input)).unwrap();
        assert!(!snapshot.is_unavailable("t1"));

        // Reversed line order: the later checked_at still wins.
        let reversed = "\
{\"tweet_id\":\"t1\",\"status\":\"available\",\"error_code\":null,\"checked_at\":\"2019-04-02T00:00:00Z\"}
{\"tweet_id\":\"t1\",\"status\":\"unavailable\",\"error_code\":144,\"checked_at\":\"2019-04-01T00:00:00Z\"}
";
        let (snapshot, _) = ingest_statuses(Cursor::new(reversed)).unwrap();
        assert!(!snapshot.is_unavailable("t1"));
    }

    #[test]
    fn checked_at_tie_keeps_later_line() {
        let input = "\
{\"tweet_id\":\"t1\",\"status\":\"unavailable\",\"error_code\":144,\"checked_at\":\"2019-04-01T00:00:00Z\"}
{\"tweet_id\":\"t1\",\"status\":\"unavailable\",\"error_code\":63,\"checked_at\":\"2019-04-01T00:00:00Z\"}
";
        let (snapshot, _) = ingest_statuses(Cursor::new(input)).unwrap();
        assert_eq!(snapshot.reason_of("t1"), Some(Reason::Suspended));
    }

    #[test]
    fn status_error_codes_map_to_reasons() {
        let input = "\
{\"tweet_id\":\"t1\",\"status\":\"unavailable\",\"error_code\":63,\"checked_at\":\"2019-04-01T00:00:00Z\"}
{\"tweet_id\":\"t2\",\"status\":\"unavailable\",\"error_code\":999,\"checked_at\":\"2019-04-01T00:00:00Z\"}
";
        let (snapshot, report) = ingest_statuses(Cursor::new(input)).unwrap();
        assert_eq!(snapshot.reason_of("t1"), Some(Reason::Suspended));
        assert_eq!(snapshot.reason_of("t2"), Some(Reason::Other));
        assert_eq!(report.unknown_codes, 1);
    }

    #[test]
    fn selection_threshold_is_inclusive() {
        let mut lines = String::new();
        for i in 0..1000 {
            lines.push_str(&format!(
                "{{\"tweet_id\":\"a{i}\",\"publication_id\":\"p1\",\"author_id\":\"u{i}\",\"kind\":\"original\"}}\n"
            ));
        }
        for i in 0..999 {
            lines.push_str(&format!(
                "{{\"tweet_id\":\"b{i}\",\"publication_id\":\"p2\",\"author_id\":\"v{i}\",\"kind\":\"original\"}}\n"
            ));
        }
        let corpus = ingest_mentions(Cursor::new(lines)).unwrap();
        let selected = select_highly_tweeted(&corpus, 1000);
        assert_eq!(selected.into_iter().collect::<Vec<_>>(), vec!["p1"]);
        let all = select_highly_tweeted(&corpus, 1);
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn unique_users_ignores_null_authors() {
        let input = "\
{\"tweet_id\":\"t1\",\"publication_id\":\"p1\",\"author_id\":\"u1\",\"kind\":\"original\"}
{\"tweet_id\":\"t2\",\"publication_id\":\"p1\",\"author_id\":\"u1\",\"kind\":\"original\"}
{\"tweet_id\":\"t3\",\"publication_id\":\"p1\",\"author_id\":null,\"kind\":\"original\"}
";
        let corpus = ingest_mentions(Cursor::new(input)).unwrap();
        assert_eq!(corpus.unique_users("p1"), 1);
    }

    #[test]
    fn corpus_round_trip() {
        let input = "\
{\"tweet_id\":\"t1\",\"publication_id\":\"p1\",\"author_id\":\"u1\",\"posted_at\":\"2016-05-01T12:00:00+02:00\",\"kind\":\"original\",\"parent_tweet_id\":null}
{\"tweet_id\":\"t2\",\"publication_id\":\"p1\",\"author_id\":null,\"posted_at\":null,\"kind\":\"retweet\",\"parent_tweet_id\":\"t1\"}
{\"tweet_id\":\"t3\",\"publication_id\":\"p2\",\"author_id\":\"u2\",\"posted_at\":null,\"kind\":\"retweet\",\"parent_tweet_id\":null}
";
        let corpus = ingest_mentions(Cursor::new(input)).unwrap();
        let mut serialized = Vec::new();
        corpus.to_jsonl(&mut serialized).unwrap();
        let reingested = ingest_mentions(Cursor::new(serialized)).unwrap();
        assert_eq!(corpus, reingested);
    }
}
