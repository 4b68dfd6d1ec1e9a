//! Deterministic removal-event semantics and instability risk.
//!
//! The central rule: a tweet is unavailable iff it was deleted, its author is
//! suspended or protected, or it is a native retweet whose root original is
//! currently unavailable. Deleting a hub original therefore takes its whole
//! retweet crowd down with it; suspension and protection do too, but those
//! revert when the user is restored, while deletion marks persist.
//!
//! State updates are incremental — each event touches only the tweets it can
//! affect. The equivalent from-scratch evaluation of the membership rule
//! exists only in test code, as an oracle.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AuthorId, Corpus, Reason, Snapshot, StatusRecord, TweetId};
use crate::structure::DisseminationStructure;

/// A removal or restoration event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "target", rename_all = "snake_case")]
pub enum RemovalEvent {
    DeleteTweet(TweetId),
    SuspendUser(AuthorId),
    ProtectUser(AuthorId),
    RestoreUser(AuthorId),
}

impl RemovalEvent {
    pub fn target(&self) -> &str {
        match self {
            RemovalEvent::DeleteTweet(t)
            | RemovalEvent::SuspendUser(t)
            | RemovalEvent::ProtectUser(t)
            | RemovalEvent::RestoreUser(t) => t,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            RemovalEvent::DeleteTweet(_) => "delete_tweet",
            RemovalEvent::SuspendUser(_) => "suspend_user",
            RemovalEvent::ProtectUser(_) => "protect_user",
            RemovalEvent::RestoreUser(_) => "restore_user",
        }
    }
}

/// Evolving set of unavailable tweets under simulated events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CascadeState {
    /// Currently unavailable tweets with the strongest applicable reason.
    pub unavailable: BTreeMap<TweetId, Reason>,
    pub suspended_users: BTreeSet<AuthorId>,
    pub protected_users: BTreeSet<AuthorId>,
}

impl CascadeState {
    pub fn is_unavailable(&self, tweet_id: &str) -> bool {
        self.unavailable.contains_key(tweet_id)
    }

    /// Snapshot view compatible with the unavailability breakdown; every
    /// unavailable tweet appears with its reason's error code.
    pub fn to_snapshot(&self, checked_at: DateTime<Utc>) -> Snapshot {
        let mut snapshot = Snapshot::new();
        for (id, reason) in &self.unavailable {
            let code = match reason {
                Reason::Deleted => 144,
                Reason::Suspended => 63,
                Reason::Protected => 179,
                Reason::PageNotFound => 34,
                Reason::Other => 0,
            };
            snapshot.insert_latest(StatusRecord::unavailable(id.clone(), code, checked_at));
        }
        snapshot
    }
}

/// Deleted beats suspended beats protected; a weaker cause never downgrades
/// a stronger mark.
fn rank(reason: Reason) -> u8 {
    match reason {
        Reason::Deleted => 3,
        Reason::Suspended => 2,
        Reason::Protected => 1,
        _ => 0,
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CascadeError {
    #[error("unknown event target `{0}`")]
    UnknownTarget(String),
    #[error("event {index} failed: {source}")]
    AtEvent {
        index: usize,
        source: Box<CascadeError>,
    },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("publication has no recorded mentions")]
    EmptyStructure,
    #[error("at least one trial required")]
    ZeroTrials,
}

/// Independent per-tweet and per-user removal probabilities for one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskProbabilities {
    pub delete: f64,
    pub suspend: f64,
    /// Applied only to users that were not suspended in the same trial.
    pub protect: f64,
}

impl RiskProbabilities {
    fn validate(&self) -> Result<(), CascadeError> {
        for p in [self.delete, self.suspend, self.protect] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(CascadeError::BadProbability(p));
            }
        }
        Ok(())
    }
}

/// Loss distribution over Monte Carlo trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskSummary {
    pub mean: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
}

/// Worst single removal event and the loss it causes.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub event: RemovalEvent,
    pub loss: f64,
}

/// Event engine for one publication's structure.
///
/// Owns the lookup tables the event semantics need: retweet -> root node,
/// author -> recorded mentions, author -> owned original nodes.
pub struct Cascade<'a> {
    structure: &'a DisseminationStructure,
    /// Node index by node id (recorded and assumed originals).
    node_index: HashMap<&'a str, usize>,
    /// Retweet id -> index of its root node.
    root_of: HashMap<&'a str, usize>,
    /// Author -> recorded mention ids of this publication, sorted.
    mentions_of: BTreeMap<&'a str, Vec<&'a str>>,
    /// Recorded mention id -> author.
    author_by_tweet: HashMap<&'a str, &'a str>,
    /// Author -> indexes of recorded original nodes they posted.
    nodes_of: HashMap<&'a str, Vec<usize>>,
    /// All recorded mention ids, sorted (originals and retweets).
    recorded: Vec<&'a str>,
    total_recorded: u64,
}

impl<'a> Cascade<'a> {
    pub fn new(structure: &'a DisseminationStructure, corpus: &'a Corpus) -> Cascade<'a> {
        let mut node_index = HashMap::new();
        let mut root_of = HashMap::new();
        let mut mentions_of: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut author_by_tweet = HashMap::new();
        let mut nodes_of: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut recorded = Vec::new();

        for (index, node) in structure.originals.iter().enumerate() {
            node_index.insert(node.tweet_id.as_str(), index);
            if !node.is_assumed() {
                recorded.push(node.tweet_id.as_str());
                if let Some(author) = node.author_id.as_deref() {
                    mentions_of.entry(author).or_default().push(&node.tweet_id);
                    author_by_tweet.insert(node.tweet_id.as_str(), author);
                    nodes_of.entry(author).or_default().push(index);
                }
            }
            for child in &node.retweet_children {
                root_of.insert(child.as_str(), index);
                recorded.push(child.as_str());
                if let Some(author) = corpus.mention(child).and_then(|m| m.author_id.as_deref()) {
                    mentions_of.entry(author).or_default().push(child);
                    author_by_tweet.insert(child.as_str(), author);
                }
            }
        }
        recorded.sort_unstable();
        for ids in mentions_of.values_mut() {
            ids.sort_unstable();
        }
        let total_recorded = recorded.len() as u64;
        Cascade {
            structure,
            node_index,
            root_of,
            mentions_of,
            author_by_tweet,
            nodes_of,
            recorded,
            total_recorded,
        }
    }

    pub fn state(&self) -> CascadeState {
        CascadeState::default()
    }

    /// Fraction of recorded mentions currently unavailable.
    pub fn loss_fraction(&self, state: &CascadeState) -> f64 {
        if self.total_recorded == 0 {
            return 0.0;
        }
        let lost = self
            .recorded
            .iter()
            .filter(|id| state.unavailable.contains_key(**id))
            .count() as u64;
        lost as f64 / self.total_recorded as f64
    }

    fn mark(&self, state: &mut CascadeState, tweet_id: &str, reason: Reason) {
        match state.unavailable.get(tweet_id) {
            Some(current) if rank(*current) >= rank(reason) => {}
            _ => {
                state.unavailable.insert(tweet_id.to_string(), reason);
            }
        }
    }

    /// Re-derives one tweet's status from the current base facts. Deleted
    /// marks persist unconditionally.
    fn reevaluate(&self, state: &mut CascadeState, tweet_id: &str, author: Option<&str>) {
        if state.unavailable.get(tweet_id) == Some(&Reason::Deleted) {
            return;
        }
        let own = author.and_then(|a| {
            if state.suspended_users.contains(a) {
                Some(Reason::Suspended)
            } else if state.protected_users.contains(a) {
                Some(Reason::Protected)
            } else {
                None
            }
        });
        let inherited = self
            .root_of
            .get(tweet_id)
            .and_then(|&i| state.unavailable.get(self.structure.originals[i].tweet_id.as_str()))
            .copied();
        let strongest = match (own, inherited) {
            (Some(a), Some(b)) => Some(if rank(a) >= rank(b) { a } else { b }),
            (a, b) => a.or(b),
        };
        match strongest {
            Some(reason) => {
                state.unavailable.insert(tweet_id.to_string(), reason);
            }
            None => {
                state.unavailable.remove(tweet_id);
            }
        }
    }

    /// Applies one event to the state.
    pub fn apply_event(
        &self,
        state: &mut CascadeState,
        event: &RemovalEvent,
    ) -> Result<(), CascadeError> {
        match event {
            RemovalEvent::DeleteTweet(id) => {
                if let Some(&index) = self.node_index.get(id.as_str()) {
                    // Deleting an original (recorded or assumed) takes every
                    // native retweet of it down as well.
                    self.mark(state, id, Reason::Deleted);
                    for child in &self.structure.originals[index].retweet_children {
                        self.mark(state, child, Reason::Deleted);
                    }
                } else if self.root_of.contains_key(id.as_str()) {
                    self.mark(state, id, Reason::Deleted);
                } else {
                    return Err(CascadeError::UnknownTarget(id.clone()));
                }
            }
            RemovalEvent::SuspendUser(user) => {
                self.user_event(state, user, Reason::Suspended)?;
            }
            RemovalEvent::ProtectUser(user) => {
                self.user_event(state, user, Reason::Protected)?;
            }
            RemovalEvent::RestoreUser(user) => {
                if !self.mentions_of.contains_key(user.as_str()) {
                    return Err(CascadeError::UnknownTarget(user.clone()));
                }
                let was_marked = state.suspended_users.remove(user)
                    | state.protected_users.remove(user);
                if !was_marked {
                    return Ok(());
                }
                // The user's originals first, then anything that may inherit
                // from them, then the rest of the user's own tweets.
                if let Some(nodes) = self.nodes_of.get(user.as_str()) {
                    for &i in nodes {
                        let node = &self.structure.originals[i];
                        self.reevaluate(state, &node.tweet_id, node.author_id.as_deref());
                    }
                    for &i in nodes {
                        for child in &self.structure.originals[i].retweet_children {
                            self.reevaluate(state, child, self.author_of(child));
                        }
                    }
                }
                if let Some(ids) = self.mentions_of.get(user.as_str()) {
                    for id in ids {
                        self.reevaluate(state, id, Some(user));
                    }
                }
            }
        }
        Ok(())
    }

    fn author_of(&self, tweet_id: &str) -> Option<&str> {
        self.author_by_tweet.get(tweet_id).copied()
    }

    fn user_event(
        &self,
        state: &mut CascadeState,
        user: &str,
        reason: Reason,
    ) -> Result<(), CascadeError> {
        let Some(ids) = self.mentions_of.get(user) else {
            return Err(CascadeError::UnknownTarget(user.to_string()));
        };
        match reason {
            Reason::Suspended => state.suspended_users.insert(user.to_string()),
            _ => state.protected_users.insert(user.to_string()),
        };
        for id in ids {
            self.mark(state, id, reason);
        }
        if let Some(nodes) = self.nodes_of.get(user) {
            for &i in nodes {
                for child in &self.structure.originals[i].retweet_children {
                    self.mark(state, child, reason);
                }
            }
        }
        Ok(())
    }

    /// Left-fold of `apply_event` over an ordered event list.
    pub fn simulate(&self, events: &[RemovalEvent]) -> Result<CascadeState, CascadeError> {
        let mut state = self.state();
        for (index, event) in events.iter().enumerate() {
            self.apply_event(&mut state, event).map_err(|source| {
                CascadeError::AtEvent {
                    index,
                    source: Box::new(source),
                }
            })?;
        }
        Ok(state)
    }

    /// Exhaustively evaluates every single delete and suspend event and
    /// returns the one maximizing loss; ties break toward the smaller target
    /// id, then delete before suspend.
    pub fn worst_case_single_event(&self) -> Result<WorstCase, CascadeError> {
        if self.total_recorded == 0 {
            return Err(CascadeError::EmptyStructure);
        }
        let mut candidates: Vec<RemovalEvent> = Vec::new();
        for node in &self.structure.originals {
            candidates.push(RemovalEvent::DeleteTweet(node.tweet_id.clone()));
            for child in &node.retweet_children {
                candidates.push(RemovalEvent::DeleteTweet(child.clone()));
            }
        }
        for author in self.mentions_of.keys() {
            candidates.push(RemovalEvent::SuspendUser((*author).to_string()));
        }
        candidates.sort_by(|a, b| {
            a.target()
                .cmp(b.target())
                .then_with(|| kind_order(a).cmp(&kind_order(b)))
        });

        let mut best: Option<WorstCase> = None;
        for event in candidates {
            let mut state = self.state();
            self.apply_event(&mut state, &event)?;
            let loss = self.loss_fraction(&state);
            if best.as_ref().is_none_or(|b| loss > b.loss) {
                best = Some(WorstCase { event, loss });
            }
        }
        Ok(best.expect("at least one candidate for a non-empty structure"))
    }

    /// Monte Carlo loss distribution under independent removals.
    ///
    /// Per trial, every recorded tweet is deleted with `delete`, every author
    /// suspended with `suspend` or else protected with `protect`, the cascade
    /// applied, and the loss recorded. Trial RNG streams derive from the seed
    /// plus the trial index, so the result does not depend on scheduling.
    pub fn monte_carlo_risk(
        &self,
        probabilities: RiskProbabilities,
        trials: u64,
        seed: u64,
    ) -> Result<RiskSummary, CascadeError> {
        probabilities.validate()?;
        if trials == 0 {
            return Err(CascadeError::ZeroTrials);
        }
        if self.total_recorded == 0 {
            return Err(CascadeError::EmptyStructure);
        }
        let mut losses: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                self.run_trial(&mut rng, probabilities)
            })
            .collect();
        losses.sort_unstable_by(f64::total_cmp);
        let mean = losses.iter().sum::<f64>() / losses.len() as f64;
        Ok(RiskSummary {
            mean,
            p50: nearest_rank(&losses, 0.50),
            p90: nearest_rank(&losses, 0.90),
            p99: nearest_rank(&losses, 0.99),
            max: *losses.last().unwrap(),
        })
    }

    fn run_trial(&self, rng: &mut ChaCha8Rng, probabilities: RiskProbabilities) -> f64 {
        let mut state = self.state();
        for id in &self.recorded {
            if rng.gen::<f64>() < probabilities.delete {
                self.apply_event(&mut state, &RemovalEvent::DeleteTweet((*id).to_string()))
                    .expect("recorded id is a valid target");
            }
        }
        for author in self.mentions_of.keys() {
            if rng.gen::<f64>() < probabilities.suspend {
                self.apply_event(&mut state, &RemovalEvent::SuspendUser((*author).to_string()))
                    .expect("known author is a valid target");
            } else if rng.gen::<f64>() < probabilities.protect {
                self.apply_event(&mut state, &RemovalEvent::ProtectUser((*author).to_string()))
                    .expect("known author is a valid target");
            }
        }
        self.loss_fraction(&state)
    }
}

fn kind_order(event: &RemovalEvent) -> u8 {
    match event {
        RemovalEvent::DeleteTweet(_) => 0,
        RemovalEvent::SuspendUser(_) => 1,
        RemovalEvent::ProtectUser(_) => 2,
        RemovalEvent::RestoreUser(_) => 3,
    }
}

/// Nearest-rank quantile over sorted values.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ingest_mentions;
    use crate::structure::build_structure;
    use std::io::Cursor;

    fn corpus_from(lines: &[String]) -> Corpus {
        ingest_mentions(Cursor::new(lines.join("\n"))).unwrap()
    }

    fn original(id: &str, author: &str) -> String {
        format!(
            "{{\"tweet_id\":\"{id}\",\"publication_id\":\"p\",\"author_id\":\"{author}\",\"kind\":\"original\"}}"
        )
    }

    fn retweet(id: &str, author: &str, parent: &str) -> String {
        format!(
            "{{\"tweet_id\":\"{id}\",\"publication_id\":\"p\",\"author_id\":\"{author}\",\"kind\":\"retweet\",\"parent_tweet_id\":\"{parent}\"}}"
        )
    }

    /// Six originals, four retweets all on o1, distinct authors.
    fn hub_corpus() -> Corpus {
        let mut lines: Vec<String> =
            (1..=6).map(|i| original(&format!("o{i}"), &format!("u{i}"))).collect();
        for i in 1..=4 {
            lines.push(retweet(&format!("r{i}"), &format!("v{i}"), "o1"));
        }
        corpus_from(&lines)
    }

    #[test]
    fn deleting_the_hub_takes_its_retweets() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let state = cascade
            .simulate(&[RemovalEvent::DeleteTweet("o1".into())])
            .unwrap();
        assert_eq!(state.unavailable.len(), 5);
        assert!((cascade.loss_fraction(&state) - 0.5).abs() < 1e-12);
        assert_eq!(state.unavailable["r1"], Reason::Deleted);
    }

    #[test]
    fn deleting_a_retweet_is_local() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let state = cascade
            .simulate(&[RemovalEvent::DeleteTweet("r1".into())])
            .unwrap();
        assert_eq!(state.unavailable.len(), 1);
        assert!(state.is_unavailable("r1"));
    }

    #[test]
    fn suspend_then_restore_is_identity() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let state = cascade
            .simulate(&[
                RemovalEvent::SuspendUser("u1".into()),
                RemovalEvent::RestoreUser("u1".into()),
            ])
            .unwrap();
        assert_eq!(state, cascade.state());
    }

    #[test]
    fn deletion_survives_restore() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        // u1 owns o1 (and its 4 retweet children by cascade); deleting r1
        // mid-suspension must stick.
        let state = cascade
            .simulate(&[
                RemovalEvent::SuspendUser("u1".into()),
                RemovalEvent::DeleteTweet("r1".into()),
                RemovalEvent::RestoreUser("u1".into()),
            ])
            .unwrap();
        assert_eq!(
            state.unavailable.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>(),
            vec!["r1"]
        );
        assert_eq!(state.unavailable["r1"], Reason::Deleted);
    }

    #[test]
    fn suspension_cascades_to_retweets_of_owned_originals() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let state = cascade
            .simulate(&[RemovalEvent::SuspendUser("u1".into())])
            .unwrap();
        // o1 plus its four retweets.
        assert_eq!(state.unavailable.len(), 5);
        assert!(state.unavailable.values().all(|&r| r == Reason::Suspended));
    }

    #[test]
    fn restore_keeps_other_causes_in_place() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        // v1 authored r1; restoring u1 must leave r1 suspended via v1.
        let state = cascade
            .simulate(&[
                RemovalEvent::SuspendUser("u1".into()),
                RemovalEvent::SuspendUser("v1".into()),
                RemovalEvent::RestoreUser("u1".into()),
            ])
            .unwrap();
        assert_eq!(
            state.unavailable.iter().map(|(k, _)| k.as_str()).collect::<Vec<_>>(),
            vec!["r1"]
        );
    }

    #[test]
    fn restore_without_marks_is_noop_and_unknown_user_errors() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let mut state = cascade.state();
        cascade
            .apply_event(&mut state, &RemovalEvent::RestoreUser("u1".into()))
            .unwrap();
        assert_eq!(state, cascade.state());
        let err = cascade
            .apply_event(&mut state, &RemovalEvent::RestoreUser("ghost".into()))
            .unwrap_err();
        assert_eq!(err, CascadeError::UnknownTarget("ghost".into()));
    }

    #[test]
    fn simulate_reports_offending_event_index() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let err = cascade
            .simulate(&[
                RemovalEvent::DeleteTweet("o1".into()),
                RemovalEvent::DeleteTweet("ghost".into()),
            ])
            .unwrap_err();
        match err {
            CascadeError::AtEvent { index, source } => {
                assert_eq!(index, 1);
                assert_eq!(*source, CascadeError::UnknownTarget("ghost".into()));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_event_list_keeps_everything_available() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let state = cascade.simulate(&[]).unwrap();
        assert!(state.unavailable.is_empty());
        let ts = chrono::TimeZone::with_ymd_and_hms(&chrono::Utc, 2019, 4, 1, 0, 0, 0).unwrap();
        assert_eq!(state.to_snapshot(ts).len(), 0);
    }

    #[test]
    fn deleting_an_assumed_node_costs_only_its_children() {
        let corpus = corpus_from(&[
            retweet("r1", "v1", "x9"),
            retweet("r2", "v2", "x9"),
            original("o1", "u1"),
        ]);
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let state = cascade
            .simulate(&[RemovalEvent::DeleteTweet("assumed:x9".into())])
            .unwrap();
        // The synthetic node is marked but is not a recorded mention.
        assert_eq!(state.unavailable.len(), 3);
        assert!((cascade.loss_fraction(&state) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn worst_case_on_hub_is_deleting_it() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let worst = cascade.worst_case_single_event().unwrap();
        assert_eq!(worst.event, RemovalEvent::DeleteTweet("o1".into()));
        assert!((worst.loss - 0.5).abs() < 1e-12);
    }

    #[test]
    fn worst_case_prefers_suspending_a_prolific_author() {
        // Dispersed shape, all six originals by one author.
        let mut lines: Vec<String> = (1..=6).map(|i| original(&format!("o{i}"), "u")).collect();
        for i in 1..=4 {
            lines.push(retweet(&format!("r{i}"), &format!("v{i}"), &format!("o{i}")));
        }
        let corpus = corpus_from(&lines);
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let worst = cascade.worst_case_single_event().unwrap();
        assert_eq!(worst.event, RemovalEvent::SuspendUser("u".into()));
        assert!((worst.loss - 1.0).abs() < 1e-12);
    }

    #[test]
    fn worst_case_single_original_is_total() {
        let corpus = corpus_from(&[original("o1", "u1")]);
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let worst = cascade.worst_case_single_event().unwrap();
        assert_eq!(worst.event, RemovalEvent::DeleteTweet("o1".into()));
        assert_eq!(worst.loss, 1.0);
    }

    #[test]
    fn monte_carlo_degenerate_probabilities() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let zero = RiskProbabilities { delete: 0.0, suspend: 0.0, protect: 0.0 };
        let summary = cascade.monte_carlo_risk(zero, 200, 42).unwrap();
        assert_eq!(summary.mean, 0.0);
        assert_eq!(summary.max, 0.0);
        let certain = RiskProbabilities { delete: 1.0, suspend: 0.0, protect: 0.0 };
        let summary = cascade.monte_carlo_risk(certain, 200, 42).unwrap();
        assert_eq!(summary.mean, 1.0);
        assert_eq!(summary.p50, 1.0);
    }

    #[test]
    fn monte_carlo_rejects_bad_probability() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let bad = RiskProbabilities { delete: 1.5, suspend: 0.0, protect: 0.0 };
        assert_eq!(
            cascade.monte_carlo_risk(bad, 10, 1).unwrap_err(),
            CascadeError::BadProbability(1.5)
        );
        let ok = RiskProbabilities { delete: 0.1, suspend: 0.0, protect: 0.0 };
        assert_eq!(
            cascade.monte_carlo_risk(ok, 0, 1).unwrap_err(),
            CascadeError::ZeroTrials
        );
    }

    #[test]
    fn monte_carlo_is_deterministic_for_a_seed() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let probabilities = RiskProbabilities { delete: 0.2, suspend: 0.1, protect: 0.1 };
        let one = cascade.monte_carlo_risk(probabilities, 500, 42).unwrap();
        let two = cascade.monte_carlo_risk(probabilities, 500, 42).unwrap();
        assert_eq!(one, two);
        let other_seed = cascade.monte_carlo_risk(probabilities, 500, 43).unwrap();
        assert_ne!(one, other_seed);
    }

    /// Exact-expectation oracle: one original with nine retweets, deletion
    /// only. Enumerates the two-level cascade outcome directly.
    #[test]
    fn monte_carlo_matches_exact_expectation() {
        let mut lines = vec![original("o1", "u0")];
        for i in 1..=9 {
            lines.push(retweet(&format!("r{i}"), &format!("v{i}"), "o1"));
        }
        let corpus = corpus_from(&lines);
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let p = 0.1f64;
        let probabilities = RiskProbabilities { delete: p, suspend: 0.0, protect: 0.0 };
        let summary = cascade.monte_carlo_risk(probabilities, 100_000, 7).unwrap();

        // E[loss] = p * 1 + (1 - p) * E[deleted retweets] / 10, with the
        // retweet count enumerated over the binomial distribution.
        let mut expected_deleted = 0.0f64;
        for k in 0..=9u32 {
            let combinations = (0..k).fold(1.0f64, |acc, i| {
                acc * (9 - i) as f64 / (i + 1) as f64
            });
            let probability =
                combinations * p.powi(k as i32) * (1.0 - p).powi(9 - k as i32);
            expected_deleted += probability * k as f64;
        }
        let expected = p + (1.0 - p) * expected_deleted / 10.0;
        assert!(
            (summary.mean - expected).abs() < 0.01,
            "mean {} vs exact {expected}",
            summary.mean
        );
    }

    #[test]
    fn appending_events_never_shrinks_the_unavailable_set() {
        let corpus = hub_corpus();
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let events = [
            RemovalEvent::ProtectUser("v2".into()),
            RemovalEvent::DeleteTweet("o3".into()),
            RemovalEvent::SuspendUser("u1".into()),
            RemovalEvent::DeleteTweet("r1".into()),
        ];
        let mut state = cascade.state();
        let mut previous: BTreeSet<String> = BTreeSet::new();
        for event in &events {
            cascade.apply_event(&mut state, event).unwrap();
            let current: BTreeSet<String> = state.unavailable.keys().cloned().collect();
            assert!(previous.is_subset(&current));
            previous = current;
        }
    }

    /// With k equal retweet buckets and distinct authors, one deletion can
    /// cost at most the hub plus one bucket.
    #[test]
    fn dispersal_bounds_single_event_loss() {
        for k in [2usize, 4, 5] {
            let retweets_per = 20 / k;
            let mut lines = Vec::new();
            for i in 0..k {
                lines.push(original(&format!("o{i}"), &format!("u{i}")));
            }
            let mut r = 0;
            for i in 0..k {
                for _ in 0..retweets_per {
                    lines.push(retweet(&format!("r{r:02}"), &format!("v{r}"), &format!("o{i}")));
                    r += 1;
                }
            }
            let corpus = corpus_from(&lines);
            let structure = build_structure(&corpus, "p").unwrap();
            let cascade = Cascade::new(&structure, &corpus);
            let total = (k + 20 / k * k) as f64;
            let bound = (1.0 + (20 / k) as f64) / total;
            let worst = cascade.worst_case_single_event().unwrap();
            assert!(
                worst.loss <= bound + 1e-12,
                "k={k}: {} > {bound}",
                worst.loss
            );
        }
    }

    #[test]
    fn concentrated_structures_lose_everything_at_once() {
        // DC = 1 with originality approaching zero: one original, many retweets.
        let mut lines = vec![original("o1", "u0")];
        for i in 0..30 {
            lines.push(retweet(&format!("r{i:02}"), &format!("v{i}"), "o1"));
        }
        let corpus = corpus_from(&lines);
        let structure = build_structure(&corpus, "p").unwrap();
        let cascade = Cascade::new(&structure, &corpus);
        let worst = cascade.worst_case_single_event().unwrap();
        assert_eq!(worst.loss, 1.0);
    }
}
