//! Rendering of command results for people and for scripts.

use std::fmt::Write;

use chrono::{DateTime, Utc};
use safekeeper_core::{ChainState, ChainedRecord, OverviewStats, Page, Timestamp, VerificationReport};
use serde::Serialize;

use crate::exit::ExitClass;

/// What a command prints, plus the exit class when the command ran to
/// completion but the outcome is a failure (a tampered store).
pub struct Output {
    pub json: serde_json::Value,
    pub human: String,
    pub failure: Option<ExitClass>,
}

impl Output {
    pub fn new(value: &impl Serialize, human: String) -> Output {
        Output {
            json: serde_json::to_value(value).expect("command output serializes"),
            human,
            failure: None,
        }
    }

    pub fn failing(mut self, class: ExitClass) -> Output {
        self.failure = Some(class);
        self
    }
}

/// `DD.MM.YYYY HH:MM:SS`, UTC.
pub fn format_time(t: Timestamp) -> String {
    DateTime::<Utc>::from_timestamp(t.as_unix(), 0)
        .map(|d| d.format("%d.%m.%Y %H:%M:%S").to_string())
        .unwrap_or_else(|| t.to_string())
}

/// Accepts RFC 3339 or integer UNIX seconds.
pub fn parse_time(s: &str) -> Result<i64, String> {
    if let Ok(secs) = s.parse::<i64>() {
        return Ok(secs);
    }
    DateTime::parse_from_rfc3339(s)
        .map(|d| d.timestamp())
        .map_err(|e| format!("`{s}` is neither RFC 3339 nor UNIX seconds: {e}"))
}

pub fn chain_state(state: &ChainState) -> String {
    format!("length {}\nhead   {}\n", state.length, state.head_hash)
}

pub fn verification(report: &VerificationReport, records: u64, torn_tail: u64) -> String {
    let mut out = String::new();
    if report.ok {
        let _ = writeln!(out, "OK: {records} records, chain intact");
    } else {
        let _ = writeln!(out, "FAILED: {} problem(s) in {records} records", report.failures.len());
        for f in &report.failures {
            let _ = writeln!(out, "  {} at {}: {}", f.class, f.location, f.detail);
        }
    }
    if torn_tail > 0 {
        let _ = writeln!(out, "note: ignored {torn_tail} bytes of an interrupted final write");
    }
    out
}

pub fn record_line(r: &ChainedRecord) -> String {
    let e = r.entry();
    format!(
        "{:>6}  {}  {}  {}  {}  {}  [{}]",
        r.sequence,
        format_time(e.timestamp),
        e.responsible,
        e.tool,
        e.kind,
        e.justification,
        e.data_types.join(", ")
    )
}

pub fn page(p: &Page) -> String {
    let mut out = String::new();
    for r in &p.items {
        let _ = writeln!(out, "{}", record_line(r));
    }
    let _ = writeln!(out, "{} of {} matching entries", p.items.len(), p.total);
    out
}

pub fn overview(stats: &OverviewStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "accesses today         {}", stats.accesses_today);
    let _ = writeln!(out, "accesses last 7 days   {}", stats.accesses_7d);
    let _ = writeln!(out, "data consumers         {}", stats.distinct_consumers_7d);
    let history: Vec<String> = stats.history_7d.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "history (oldest first) {}", history.join(" "));
    for c in &stats.top_consumers_7d {
        let _ = writeln!(out, "  {:>5}  {}", c.count, c.consumer);
    }
    out
}
