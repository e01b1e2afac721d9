//! A hand-built set of usages for one data owner, used to exercise the
//! overview and the dashboard. Relative to `now` it contains, for
//! [`SAMPLE_OWNER`]: 11 usages today, 128 in the last seven days, and 9
//! distinct consumers, plus usages outside the window and of other owners.

use crate::entry::UsageLogEntry;
use crate::time::{Timestamp, SECONDS_PER_DAY};

pub const SAMPLE_OWNER: &str = "demo@example.com";

pub const SAMPLE_CONSUMERS: [&str; 9] = [
    "erick@example.com",
    "ana@example.com",
    "bilal@example.com",
    "chen@example.com",
    "dora@example.com",
    "emre@example.com",
    "fatima@example.com",
    "gus@example.com",
    "hana@example.com",
];

const TOOLS: [&str; 4] = ["jira", "confluence", "git-analyzer", "slack-network"];
const KINDS: [&str; 2] = ["access", "aggregation"];

/// The example row shown in the owner's usage table:
/// erick@example.com / confluence / aggregation at 2021-10-28T23:27:05Z.
pub fn example_row() -> UsageLogEntry {
    UsageLogEntry {
        entry_id: "sample-erick-confluence".into(),
        responsible: "erick@example.com".into(),
        tool: "confluence".into(),
        kind: "aggregation".into(),
        justification: "Summarize how many pages were created per user".into(),
        data_types: vec!["user_name".into(), "pages_created".into(), "page_creator".into()],
        owners: vec![SAMPLE_OWNER.into()],
        timestamp: Timestamp::from_unix(1_635_463_625),
    }
}

/// The default `now` for the sample: 2021-10-29T12:00:00Z, the day after
/// [`example_row`].
pub const SAMPLE_NOW: Timestamp = Timestamp::from_unix(1_635_508_800);

/// Builds the sample relative to `now`, which must be at least 11 * 50
/// minutes past UTC midnight. With [`SAMPLE_NOW`] the example row is one of
/// yesterday's usages.
pub fn dashboard_sample(now: Timestamp) -> Vec<UsageLogEntry> {
    let today = now.day_start().as_unix();
    assert!(
        now.as_unix() - today >= 11 * 3000,
        "sample needs `now` at least 09:10 UTC"
    );
    let mut out = Vec::new();
    let mut push = |i: usize, owners: Vec<String>, ts: i64| {
        out.push(UsageLogEntry {
            entry_id: format!("sample-{i:03}"),
            responsible: SAMPLE_CONSUMERS[(i * 7 + i / 9) % 9].into(),
            tool: TOOLS[i % 4].into(),
            kind: KINDS[(i / 4) % 2].into(),
            justification: format!("Team report #{i}"),
            data_types: vec!["user_name".into(), ["commit_time", "reviews_performed", "pages_created"][i % 3].into()],
            owners,
            timestamp: Timestamp::from_unix(ts),
        });
    };
    let owner = || vec![SAMPLE_OWNER.to_string()];

    let mut i = 0;
    for k in 0..11 {
        push(i, owner(), today + k * 3000);
        i += 1;
    }
    // 116 over the previous six days; the example row makes 117.
    for (days_back, count) in [(1, 18), (2, 20), (3, 20), (4, 19), (5, 19), (6, 20)] {
        for j in 0..count {
            push(i, owner(), today - days_back * SECONDS_PER_DAY + 3600 + j * 3500);
            i += 1;
        }
    }
    // Outside the window or not this owner's data.
    for k in 0..4 {
        push(i, owner(), today - 7 * SECONDS_PER_DAY - 1 - k * 600);
        i += 1;
    }
    for k in 0..5 {
        push(i, vec!["someone@example.com".into()], today + k * 60);
        i += 1;
    }
    push(i, owner(), now.as_unix() + 3600);

    if now == SAMPLE_NOW {
        out.push(example_row());
    } else {
        let mut row = example_row();
        row.timestamp = Timestamp::from_unix(today - SECONDS_PER_DAY + 84_425);
        out.push(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_is_valid() {
        for e in dashboard_sample(SAMPLE_NOW) {
            e.validate().unwrap();
        }
    }

    #[test]
    fn example_row_is_yesterday_relative_to_sample_now() {
        let row = example_row();
        assert_eq!(row.timestamp.day_number(), SAMPLE_NOW.day_number() - 1);
    }
}
