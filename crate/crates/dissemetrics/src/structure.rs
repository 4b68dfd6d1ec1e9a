//! Reconstruction of per-publication dissemination structures.
//!
//! A dissemination structure is a two-level forest: original tweets at the
//! root, their native retweets as direct children. Retweets whose root was
//! never recorded still need a parent for the retweeting link to exist, so a
//! synthetic *assumed* original is created: shared when the retweets name the
//! same missing parent id, a singleton when the parent id is absent entirely.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::model::{AuthorId, Corpus, MentionKind, PublicationId, TweetId};

/// Prefix reserved for synthetic original ids; real tweet ids never carry it.
pub const ASSUMED_PREFIX: &str = "assumed:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// The original tweet is itself a recorded mention.
    Recorded,
    /// Synthesized root for retweets whose original was never recorded.
    Assumed,
}

/// One original-tweet node and the retweets attached to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginalNode {
    pub tweet_id: TweetId,
    pub provenance: Provenance,
    pub author_id: Option<AuthorId>,
    /// Child retweet ids, sorted ascending.
    pub retweet_children: Vec<TweetId>,
}

impl OriginalNode {
    pub fn is_assumed(&self) -> bool {
        self.provenance == Provenance::Assumed
    }
}

/// The dissemination structure of one publication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisseminationStructure {
    pub publication_id: PublicationId,
    /// All original nodes (recorded and assumed), sorted by tweet id.
    pub originals: Vec<OriginalNode>,
    /// Retweets that carried no parent id at all and got singleton nodes.
    pub orphan_singletons: u64,
    /// Retweets whose parent id pointed at another retweet.
    pub chained_retweets: u64,
}

/// Node and retweet counts of a built structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureCensus {
    pub recorded_originals: u64,
    pub assumed_originals: u64,
    pub retweets: u64,
    pub orphan_singletons: u64,
}

impl DisseminationStructure {
    pub fn node(&self, tweet_id: &str) -> Option<&OriginalNode> {
        self.originals
            .binary_search_by(|n| n.tweet_id.as_str().cmp(tweet_id))
            .ok()
            .map(|i| &self.originals[i])
    }

    pub fn recorded_original_count(&self) -> u64 {
        self.originals.iter().filter(|n| !n.is_assumed()).count() as u64
    }

    pub fn retweet_count(&self) -> u64 {
        self.originals
            .iter()
            .map(|n| n.retweet_children.len() as u64)
            .sum()
    }

    /// Recorded mentions only; assumed nodes never contribute.
    pub fn total_recorded(&self) -> u64 {
        self.recorded_original_count() + self.retweet_count()
    }

    pub fn census(&self) -> StructureCensus {
        StructureCensus {
            recorded_originals: self.recorded_original_count(),
            assumed_originals: self.originals.iter().filter(|n| n.is_assumed()).count() as u64,
            retweets: self.retweet_count(),
            orphan_singletons: self.orphan_singletons,
        }
    }

    /// Writes one line-delimited object per original node:
    /// `{publication_id, original_id, provenance, children:[...]}`.
    pub fn to_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct NodeLine<'a> {
            publication_id: &'a str,
            original_id: &'a str,
            provenance: Provenance,
            children: &'a [TweetId],
        }
        for node in &self.originals {
            let line = NodeLine {
                publication_id: &self.publication_id,
                original_id: &node.tweet_id,
                provenance: node.provenance,
                children: &node.retweet_children,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("unknown publication `{0}`")]
    UnknownPublication(String),
}

/// Where a retweet ends up attaching.
enum Attachment {
    /// Parent is a recorded original of the same publication.
    Recorded(TweetId),
    /// Parent id known but not recorded as an original here; shared node.
    Assumed(TweetId),
    /// No usable parent; singleton node keyed by the retweet's own id.
    Singleton,
}

/// Builds the dissemination structure of one publication.
///
/// Retweet-of-retweet references are normalized to the root original;
/// unresolvable chains (including reference cycles) degrade to singleton
/// assumed nodes. Output ordering is by tweet id, so any permutation of the
/// corpus input yields an identical structure.
pub fn build_structure(
    corpus: &Corpus,
    publication_id: &str,
) -> Result<DisseminationStructure, StructureError> {
    let tweets = corpus
        .publication_tweets(publication_id)
        .ok_or_else(|| StructureError::UnknownPublication(publication_id.to_string()))?;

    let mut nodes: BTreeMap<TweetId, OriginalNode> = BTreeMap::new();
    let mut orphan_singletons = 0u64;
    let mut chained_retweets = 0u64;

    for id in tweets {
        let record = corpus.mention(id).expect("publication index is consistent");
        if record.kind == MentionKind::Original {
            nodes.insert(
                id.clone(),
                OriginalNode {
                    tweet_id: id.clone(),
                    provenance: Provenance::Recorded,
                    author_id: record.author_id.clone(),
                    retweet_children: Vec::new(),
                },
            );
        }
    }

    for id in tweets {
        let record = corpus.mention(id).expect("publication index is consistent");
        if record.kind != MentionKind::Retweet {
            continue;
        }
        let (attachment, chained) = resolve_parent(corpus, publication_id, record.parent_tweet_id.as_deref());
        if chained {
            chained_retweets += 1;
        }
        let node_id = match attachment {
            Attachment::Recorded(parent) => parent,
            Attachment::Assumed(parent) => format!("{ASSUMED_PREFIX}{parent}"),
            Attachment::Singleton => {
                orphan_singletons += 1;
                format!("{ASSUMED_PREFIX}{id}")
            }
        };
        nodes
            .entry(node_id.clone())
            .or_insert_with(|| OriginalNode {
                tweet_id: node_id,
                provenance: Provenance::Assumed,
                author_id: None,
                retweet_children: Vec::new(),
            })
            .retweet_children
            .push(id.clone());
    }

    let mut originals: Vec<OriginalNode> = nodes.into_values().collect();
    for node in &mut originals {
        node.retweet_children.sort_unstable();
    }

    Ok(DisseminationStructure {
        publication_id: publication_id.to_string(),
        originals,
        orphan_singletons,
        chained_retweets,
    })
}

/// Follows a retweet's parent reference to its attachment point.
///
/// Returns the attachment and whether the reference passed through another
/// retweet. Chains are followed through recorded retweets of the same
/// publication until an original, a foreign/unrecorded id, or a dead end.
fn resolve_parent(
    corpus: &Corpus,
    publication_id: &str,
    parent: Option<&str>,
) -> (Attachment, bool) {
    let Some(first) = parent else {
        return (Attachment::Singleton, false);
    };
    let mut chained = false;
    let mut current = first;
    let mut hops = 0usize;
    loop {
        match corpus.mention(current) {
            Some(rec) if rec.publication_id == publication_id => match rec.kind {
                MentionKind::Original => return (Attachment::Recorded(current.to_string()), chained),
                MentionKind::Retweet => {
                    chained = true;
                    match rec.parent_tweet_id.as_deref() {
                        Some(next) => {
                            hops += 1;
                            // A cycle of retweet references can never reach a
                            // root; cap the walk and degrade.
                            if hops > corpus.len() {
                                return (Attachment::Singleton, chained);
                            }
                            current = next;
                        }
                        None => return (Attachment::Singleton, chained),
                    }
                }
            },
            // Unrecorded here: the original must have existed, so it anchors
            // a shared assumed node under its referenced id.
            _ => return (Attachment::Assumed(current.to_string()), chained),
        }
    }
}
