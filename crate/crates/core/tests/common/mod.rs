#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use safekeeper_core::auth::generate_signing_key;
use safekeeper_core::{
    append, sign_envelope, ChainState, ChainedRecord, PublicKey, SigningKey, Timestamp,
    ToolRegistry, UsageLogEntry,
};

pub const TOOLS: &[&str] = &["jira", "git-analyzer", "slack-network", "confluence"];
pub const KINDS: &[&str] = &["access", "aggregation", "export"];
pub const DATA_TYPES: &[&str] = &["user_name", "pages_created", "commit_time", "reviews_performed", "mentions"];
pub const JUSTIFICATIONS: &[&str] = &[
    "Sprint health review",
    "Summarize how many pages were created per user",
    "Quarterly Jira cleanup",
    "who reviews most",
    "",
];

pub struct Signers {
    pub keys: Vec<(String, SigningKey)>,
    pub registry: ToolRegistry,
}

pub fn signers() -> Signers {
    let mut registry = ToolRegistry::new();
    let keys = TOOLS
        .iter()
        .map(|t| {
            let key = generate_signing_key();
            registry
                .register(t, PublicKey(key.verifying_key()), Timestamp::from_unix(0))
                .unwrap();
            (t.to_string(), key)
        })
        .collect();
    Signers { keys, registry }
}

pub fn person(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}@example.com")
}

/// Random entry with timestamps in `[base, base + span)`.
pub fn random_entry(rng: &mut ChaCha8Rng, id: usize, base: i64, span: i64) -> (usize, UsageLogEntry) {
    let tool_idx = rng.gen_range(0..TOOLS.len());
    let owner_count = rng.gen_range(1..=3);
    let mut owners: Vec<String> = (0..owner_count).map(|_| person("owner", rng.gen_range(0..6))).collect();
    owners.dedup();
    let dt_count = rng.gen_range(1..=3);
    let data_types = (0..dt_count)
        .map(|_| DATA_TYPES[rng.gen_range(0..DATA_TYPES.len())].to_string())
        .collect();
    let entry = UsageLogEntry {
        entry_id: format!("e-{id}"),
        responsible: person("lead", rng.gen_range(0..12)),
        tool: TOOLS[tool_idx].to_string(),
        kind: KINDS[rng.gen_range(0..KINDS.len())].to_string(),
        justification: JUSTIFICATIONS[rng.gen_range(0..JUSTIFICATIONS.len())].to_string(),
        data_types,
        owners,
        timestamp: Timestamp::from_unix(base + rng.gen_range(0..span)),
    };
    (tool_idx, entry)
}

pub fn signed_chain(signers: &Signers, seed: u64, n: usize, base: i64, span: i64) -> Vec<ChainedRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ChainState::genesis();
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let (tool_idx, entry) = random_entry(&mut rng, i, base, span);
        let (tool, key) = &signers.keys[tool_idx];
        let env = sign_envelope(key, entry, tool, Timestamp::from_unix(base)).unwrap();
        let (record, next) = append(&state, env).unwrap();
        records.push(record);
        state = next;
    }
    records
}
