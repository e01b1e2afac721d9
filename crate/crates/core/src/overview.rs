use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::chain::ChainedRecord;
use crate::time::{Timestamp, SECONDS_PER_DAY};

pub const HISTORY_DAYS: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsumerCount {
    pub consumer: String,
    pub count: u64,
}

/// A data owner's summary of recent usages of their data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverviewStats {
    pub accesses_today: u64,
    pub accesses_7d: u64,
    pub distinct_consumers_7d: u64,
    /// Per-day counts, oldest first; the last element is today.
    pub history_7d: [u64; HISTORY_DAYS],
    /// Every consumer in the window, by count descending then id ascending.
    pub top_consumers_7d: Vec<ConsumerCount>,
}

impl OverviewStats {
    pub fn empty() -> Self {
        OverviewStats {
            accesses_today: 0,
            accesses_7d: 0,
            distinct_consumers_7d: 0,
            history_7d: [0; HISTORY_DAYS],
            top_consumers_7d: Vec::new(),
        }
    }
}

/// Counts usages of `owner`'s data. The window is the seven UTC calendar
/// days ending with today, up to and including `now`.
pub fn compute_overview<'a, I>(records: I, owner: &str, now: Timestamp) -> OverviewStats
where
    I: IntoIterator<Item = &'a ChainedRecord>,
{
    let today = now.day_number();
    let mut stats = OverviewStats::empty();
    let mut per_consumer: HashMap<&str, u64> = HashMap::new();

    for record in records {
        let entry = record.entry();
        if !entry.is_owned_by(owner) || entry.timestamp > now {
            continue;
        }
        let age = today - entry.timestamp.day_number();
        if !(0..HISTORY_DAYS as i64).contains(&age) {
            continue;
        }
        stats.history_7d[HISTORY_DAYS - 1 - age as usize] += 1;
        stats.accesses_7d += 1;
        *per_consumer.entry(entry.responsible.as_str()).or_default() += 1;
    }

    stats.accesses_today = stats.history_7d[HISTORY_DAYS - 1];
    stats.distinct_consumers_7d = per_consumer.len() as u64;
    let mut ranked: Vec<ConsumerCount> = per_consumer
        .into_iter()
        .map(|(consumer, count)| ConsumerCount {
            consumer: consumer.to_owned(),
            count,
        })
        .collect();
    ranked.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.consumer.cmp(&b.consumer)));
    stats.top_consumers_7d = ranked;
    stats
}

/// First instant counted by the seven-day window ending at `now`.
pub fn window_start(now: Timestamp) -> Timestamp {
    Timestamp::from_unix(now.day_start().as_unix() - (HISTORY_DAYS as i64 - 1) * SECONDS_PER_DAY)
}
