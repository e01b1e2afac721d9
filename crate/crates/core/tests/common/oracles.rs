//! Brute-force reference implementations, written independently of the
//! library's query and overview code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use safekeeper_core::{ChainedRecord, QueryFilter};

/// Sequences of the requested page and the total match count.
pub fn brute_query(records: &[ChainedRecord], f: &QueryFilter) -> (Vec<u64>, u64) {
    let mut hits: Vec<(i64, u64)> = Vec::new();
    for r in records {
        let e = r.entry();
        let mut ok = true;
        if let Some(o) = &f.owner {
            let mut found = false;
            for owner in &e.owners {
                if owner == o {
                    found = true;
                }
            }
            ok &= found;
        }
        if let Some(x) = &f.responsible {
            ok &= &e.responsible == x;
        }
        if let Some(x) = &f.tool {
            ok &= &e.tool == x;
        }
        if let Some(x) = &f.kind {
            ok &= &e.kind == x;
        }
        if let Some(from) = f.from {
            ok &= e.timestamp.as_unix() >= from.as_unix();
        }
        if let Some(to) = f.to {
            ok &= e.timestamp.as_unix() < to.as_unix();
        }
        if let Some(t) = &f.text {
            let needle = t.to_lowercase();
            let mut hay = vec![e.justification.to_lowercase()];
            hay.extend(e.data_types.iter().map(|d| d.to_lowercase()));
            ok &= hay.iter().any(|h| h.contains(&needle));
        }
        if ok {
            hits.push((e.timestamp.as_unix(), r.sequence));
        }
    }
    // Newest first: descending (timestamp, sequence).
    hits.sort();
    hits.reverse();
    let total = hits.len() as u64;
    let mut page = Vec::new();
    for (i, (_, seq)) in hits.iter().enumerate() {
        let p = i / f.page_size as usize;
        if p == f.page_index as usize {
            page.push(*seq);
        }
    }
    (page, total)
}

pub struct BruteOverview {
    pub today: u64,
    pub week: u64,
    pub distinct: u64,
    pub history: [u64; 7],
    pub top: Vec<(String, u64)>,
}

/// Recount by walking each of the seven calendar days explicitly.
pub fn brute_overview(records: &[ChainedRecord], owner: &str, now: i64) -> BruteOverview {
    let day = 86_400i64;
    let midnight = now - now.rem_euclid(day);
    let mut history = [0u64; 7];
    let mut consumers: BTreeMap<String, u64> = BTreeMap::new();
    for (slot, days_back) in (0..7).rev().enumerate() {
        let start = midnight - days_back * day;
        let end = if days_back == 0 { now + 1 } else { start + day };
        for r in records {
            let e = r.entry();
            let t = e.timestamp.as_unix();
            if e.owners.iter().any(|o| o == owner) && t >= start && t < end {
                history[slot] += 1;
                *consumers.entry(e.responsible.clone()).or_insert(0) += 1;
            }
        }
    }
    let mut top: Vec<(String, u64)> = consumers.into_iter().collect();
    top.sort_by(|a, b| (std::cmp::Reverse(a.1), &a.0).cmp(&(std::cmp::Reverse(b.1), &b.0)));
    BruteOverview {
        today: history[6],
        week: history.iter().sum(),
        distinct: top.len() as u64,
        history,
        top,
    }
}
