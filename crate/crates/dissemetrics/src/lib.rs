//! Dissemination-structure analytics for tweet mention dumps.
//!
//! A publication's tweet mentions form a two-level forest: original tweets
//! and the native retweets attached to them. That shape decides how fragile
//! the publication's mention count is — when a heavily retweeted original
//! disappears, its whole retweet crowd disappears with it. This crate
//! rebuilds those structures from line-delimited dumps, scores them, audits
//! which tweets are still retrievable, and simulates removal cascades.
//!
//! ## Capabilities
//!
//! - **Ingestion** ([`model`]): streaming `mentions.jsonl` / `statuses.jsonl`
//!   readers with per-line validation and a full accounting report.
//! - **Structure reconstruction** ([`structure`]): originals, retweet
//!   children, and assumed originals for retweets whose root was never
//!   recorded.
//! - **Indicators** ([`metrics`]): mention totals, unique users, degree of
//!   originality, degree of concentration, median-split quadrants, and the
//!   unavailability decomposition.
//! - **Availability auditing** ([`audit`]): batched lookups (at most 100 ids
//!   per call) against a pluggable [`audit::StatusSource`], with retries,
//!   bounded concurrency, the error-code taxonomy, and reason/yearly tallies.
//! - **Cascade simulation** ([`cascade`]): deterministic delete / suspend /
//!   protect / restore semantics, worst-case single-event search, and seeded
//!   Monte Carlo loss distributions.
//! - **Statistics** ([`stats`]): discrete power-law fitting with KS-scan
//!   cutoff selection, empirical PDF/CCDF series, Spearman rank correlation.
//! - **Reports** ([`report`], [`cli`]): fixed-header CSVs written atomically,
//!   byte-stable across reruns.
//!
//! ## Runnable examples
//!
//! Each major capability has a self-contained example:
//!
//! ```bash
//! cargo run --example ingest_report
//! cargo run --example dissemination_structures
//! cargo run --example indicator_metrics
//! cargo run --example availability_audit
//! cargo run --example cascade_scenarios
//! cargo run --example monte_carlo_risk
//! cargo run --example power_law_fit
//! cargo run --example rank_correlation
//! ```
//!
//! ## Quick start
//!
//! ```
//! use dissemetrics::model::ingest_mentions;
//! use dissemetrics::structure::build_structure;
//! use dissemetrics::metrics::{degree_of_concentration, degree_of_originality};
//!
//! let dump = r#"{"tweet_id":"o1","publication_id":"p","author_id":"u1","kind":"original"}
//! {"tweet_id":"r1","publication_id":"p","author_id":"u2","kind":"retweet","parent_tweet_id":"o1"}
//! {"tweet_id":"r2","publication_id":"p","author_id":"u3","kind":"retweet","parent_tweet_id":"o1"}"#;
//!
//! let corpus = ingest_mentions(std::io::Cursor::new(dump)).unwrap();
//! let structure = build_structure(&corpus, "p").unwrap();
//! assert_eq!(degree_of_originality(&structure).unwrap(), 1.0 / 3.0);
//! assert_eq!(degree_of_concentration(&structure), 1.0);
//! ```
//!
//! The same pipeline is reachable from the `dissemetrics` binary via the
//! `validate`, `metrics`, `audit`, `breakdown`, `simulate`, `fit`, and
//! `correlate` subcommands.

pub mod audit;
pub mod cascade;
pub mod cli;
pub mod metrics;
pub mod model;
pub mod report;
pub mod stats;
pub mod structure;

pub use cascade::{Cascade, CascadeState, RemovalEvent};
pub use metrics::{StructureMetrics, UnavailabilityBreakdown};
pub use model::{Corpus, MentionRecord, Reason, Snapshot, StatusRecord};
pub use structure::DisseminationStructure;
