//! Deterministic inputs for the benchmarks.

use safekeeper_core::auth::generate_signing_key;
use safekeeper_core::{
    append, sign_envelope, ChainState, ChainedRecord, PublicKey, SignedEnvelope, SigningKey, Timestamp,
    ToolRegistry, UsageLogEntry,
};

pub const NOW: Timestamp = Timestamp::from_unix(1_700_000_000);
pub const TOOL: &str = "jira";

pub fn entry(i: usize) -> UsageLogEntry {
    UsageLogEntry {
        entry_id: format!("bench-{i}"),
        responsible: format!("lead{}@example.com", i % 9),
        tool: TOOL.into(),
        kind: if i.is_multiple_of(3) { "access" } else { "aggregation" }.into(),
        justification: "Summarize how many pages were created per user".into(),
        data_types: vec!["user_name".into(), "pages_created".into()],
        owners: vec![format!("dev{}@example.com", i % 5), "demo@example.com".into()],
        // Spread over the ten days before NOW.
        timestamp: NOW.plus_secs(-((i as i64 * 7_919) % 864_000)),
    }
}

pub struct Fixture {
    pub key: SigningKey,
    pub registry: ToolRegistry,
    pub envelopes: Vec<SignedEnvelope>,
    pub records: Vec<ChainedRecord>,
}

pub fn fixture(n: usize) -> Fixture {
    let key = generate_signing_key();
    let mut registry = ToolRegistry::new();
    registry
        .register(TOOL, PublicKey(key.verifying_key()), NOW)
        .expect("fresh registry");
    let envelopes: Vec<SignedEnvelope> = (0..n)
        .map(|i| sign_envelope(&key, entry(i), TOOL, NOW).expect("valid entry"))
        .collect();
    let mut state = ChainState::genesis();
    let records = envelopes
        .iter()
        .map(|env| {
            let (record, next) = append(&state, env.clone()).expect("valid envelope");
            state = next;
            record
        })
        .collect();
    Fixture {
        key,
        registry,
        envelopes,
        records,
    }
}
