//! Fixture builders shared by the integration tests.
#![allow(dead_code)]

use std::fmt::Write as _;

pub fn original_line(tweet: &str, publication: &str, author: &str) -> String {
    format!(
        "{{\"tweet_id\":\"{tweet}\",\"publication_id\":\"{publication}\",\"author_id\":\"{author}\",\"kind\":\"original\"}}"
    )
}

pub fn retweet_line(
    tweet: &str,
    publication: &str,
    author: &str,
    parent: Option<&str>,
) -> String {
    let parent = parent.map_or("null".to_string(), |p| format!("\"{p}\""));
    format!(
        "{{\"tweet_id\":\"{tweet}\",\"publication_id\":\"{publication}\",\"author_id\":\"{author}\",\"kind\":\"retweet\",\"parent_tweet_id\":{parent}}}"
    )
}

pub fn unavailable_line(tweet: &str, code: i64) -> String {
    format!(
        "{{\"tweet_id\":\"{tweet}\",\"status\":\"unavailable\",\"error_code\":{code},\"checked_at\":\"2019-04-01T00:00:00Z\"}}"
    )
}

/// Ten-mention publication: `originals` roots plus retweets spread over the
/// first `spread.len()` roots. Every mention has a distinct author.
pub fn shaped_publication(publication: &str, originals: usize, spread: &[usize]) -> String {
    let mut out = String::new();
    for i in 0..originals {
        let _ = writeln!(
            out,
            "{}",
            original_line(
                &format!("{publication}-o{i}"),
                publication,
                &format!("{publication}-u{i}")
            )
        );
    }
    let mut serial = 0usize;
    for (root, count) in spread.iter().enumerate() {
        for _ in 0..*count {
            let _ = writeln!(
                out,
                "{}",
                retweet_line(
                    &format!("{publication}-r{serial}"),
                    publication,
                    &format!("{publication}-v{serial}"),
                    Some(&format!("{publication}-o{root}")),
                )
            );
            serial += 1;
        }
    }
    out
}

/// Expected breakdown columns for one worst-case publication.
#[derive(Debug, Clone, Copy)]
pub struct WorstCaseRow {
    pub publication_id: &'static str,
    pub total: u64,
    pub originals: u64,
    pub unavailable_total: u64,
    pub unavailable_originals: u64,
    pub unavailable_retweets: u64,
    pub max_single: u64,
}

/// The ten highest-unavailability publications used across the tests.
pub const WORST_CASE_ROWS: [WorstCaseRow; 10] = [
    WorstCaseRow { publication_id: "860866", total: 2891, originals: 1, unavailable_total: 2891, unavailable_originals: 1, unavailable_retweets: 2890, max_single: 2890 },
    WorstCaseRow { publication_id: "1903289", total: 1274, originals: 3, unavailable_total: 1268, unavailable_originals: 0, unavailable_retweets: 1268, max_single: 1268 },
    WorstCaseRow { publication_id: "2433232", total: 1230, originals: 11, unavailable_total: 1213, unavailable_originals: 0, unavailable_retweets: 1213, max_single: 1213 },
    WorstCaseRow { publication_id: "671264", total: 1241, originals: 23, unavailable_total: 1198, unavailable_originals: 0, unavailable_retweets: 1198, max_single: 1190 },
    WorstCaseRow { publication_id: "2598509", total: 3659, originals: 122, unavailable_total: 3440, unavailable_originals: 4, unavailable_retweets: 3436, max_single: 3319 },
    WorstCaseRow { publication_id: "10068074", total: 1563, originals: 94, unavailable_total: 1467, unavailable_originals: 17, unavailable_retweets: 1450, max_single: 1426 },
    WorstCaseRow { publication_id: "20898178", total: 1017, originals: 34, unavailable_total: 950, unavailable_originals: 0, unavailable_retweets: 950, max_single: 950 },
    WorstCaseRow { publication_id: "2983430", total: 1290, originals: 76, unavailable_total: 1195, unavailable_originals: 41, unavailable_retweets: 1154, max_single: 151 },
    WorstCaseRow { publication_id: "20066690", total: 1367, originals: 10, unavailable_total: 1265, unavailable_originals: 1, unavailable_retweets: 1264, max_single: 1253 },
    WorstCaseRow { publication_id: "2939857", total: 1266, originals: 86, unavailable_total: 1145, unavailable_originals: 43, unavailable_retweets: 1102, max_single: 248 },
];

/// Builds one worst-case publication and its unavailability verdicts.
///
/// Layout: the first `unavailable_originals` originals are marked
/// unavailable; `max_single` unavailable retweets sit on one hub node (the
/// first unavailable original when there is one, otherwise an assumed node
/// for a never-recorded root); the rest of the unavailable retweets spread
/// over further assumed nodes in buckets no larger than the hub's; still
/// available retweets attach to the hub as well.
pub fn worst_case_publication(row: &WorstCaseRow) -> (String, String) {
    let p = row.publication_id;
    let mut mentions = String::new();
    let mut statuses = String::new();
    assert_eq!(
        row.unavailable_total,
        row.unavailable_originals + row.unavailable_retweets
    );
    for i in 0..row.originals {
        let id = format!("{p}-o{i}");
        let _ = writeln!(mentions, "{}", original_line(&id, p, &format!("{p}-u{i}")));
        if i < row.unavailable_originals {
            let _ = writeln!(statuses, "{}", unavailable_line(&id, 144));
        }
    }

    let retweets = row.total - row.originals;
    let mut serial = 0u64;
    let mut emit_retweet = |parent: Option<&str>, unavailable: bool,
                            mentions: &mut String, statuses: &mut String| {
        let id = format!("{p}-r{serial}");
        let _ = writeln!(
            mentions,
            "{}",
            retweet_line(&id, p, &format!("{p}-w{serial}"), parent)
        );
        if unavailable {
            let _ = writeln!(statuses, "{}", unavailable_line(&id, 144));
        }
        serial += 1;
    };

    // Hub for the densest unavailable block.
    let hub = if row.unavailable_originals > 0 {
        format!("{p}-o0")
    } else {
        format!("{p}-x0")
    };
    for _ in 0..row.max_single {
        emit_retweet(Some(&hub), true, &mut mentions, &mut statuses);
    }
    // Remaining unavailable retweets in buckets capped at the hub's size.
    let mut remaining = row.unavailable_retweets - row.max_single;
    let mut bucket = 1u64;
    while remaining > 0 {
        let here = remaining.min(row.max_single.max(1));
        let parent = format!("{p}-x{bucket}");
        for _ in 0..here {
            emit_retweet(Some(&parent), true, &mut mentions, &mut statuses);
        }
        remaining -= here;
        bucket += 1;
    }
    // Available retweets also hang off the hub; only unavailable children
    // count toward the per-node maximum.
    let available = retweets - row.unavailable_retweets;
    for _ in 0..available {
        emit_retweet(Some(&hub), false, &mut mentions, &mut statuses);
    }
    (mentions, statuses)
}

/// Full worst-case corpus: all ten publications plus their status dump.
pub fn worst_case_corpus() -> (String, String) {
    let mut mentions = String::new();
    let mut statuses = String::new();
    for row in &WORST_CASE_ROWS {
        let (m, s) = worst_case_publication(row);
        mentions.push_str(&m);
        statuses.push_str(&s);
    }
    (mentions, statuses)
}
