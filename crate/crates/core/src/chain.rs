//! The append-only, hash-chained usage log.
//!
//! `entry_hash = SHA-256(prev_hash || envelope_bytes)` where `envelope_bytes`
//! is the canonical encoding from [`crate::canonical`]. The first record's
//! `prev_hash` is 32 zero bytes.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::auth::{Rejection, ToolRegistry};
use crate::canonical::envelope_bytes;
use crate::digest::Digest;
use crate::entry::UsageLogEntry;
use crate::envelope::SignedEnvelope;
use crate::error::InvalidField;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainedRecord {
    pub sequence: u64,
    pub prev_hash: Digest,
    pub entry_hash: Digest,
    pub envelope: SignedEnvelope,
}

impl ChainedRecord {
    pub fn entry(&self) -> &UsageLogEntry {
        &self.envelope.payload.entry
    }
}

#[derive(Serialize, Deserialize)]
struct RecordWire {
    sequence: u64,
    entry: UsageLogEntry,
    prev_hash: Digest,
    entry_hash: Digest,
    envelope: SignedEnvelope,
}

impl Serialize for ChainedRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RecordWire {
            sequence: self.sequence,
            entry: self.entry().clone(),
            prev_hash: self.prev_hash,
            entry_hash: self.entry_hash,
            envelope: self.envelope.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChainedRecord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = RecordWire::deserialize(deserializer)?;
        if wire.entry != wire.envelope.payload.entry {
            return Err(serde::de::Error::custom(
                "record entry differs from the entry inside its envelope",
            ));
        }
        Ok(ChainedRecord {
            sequence: wire.sequence,
            prev_hash: wire.prev_hash,
            entry_hash: wire.entry_hash,
            envelope: wire.envelope,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainState {
    pub head_hash: Digest,
    pub length: u64,
}

impl ChainState {
    pub fn genesis() -> Self {
        ChainState {
            head_hash: Digest::GENESIS,
            length: 0,
        }
    }

    /// State after the last of `records`.
    pub fn of(records: &[ChainedRecord]) -> Self {
        match records.last() {
            Some(last) => ChainState {
                head_hash: last.entry_hash,
                length: records.len() as u64,
            },
            None => Self::genesis(),
        }
    }
}

impl Default for ChainState {
    fn default() -> Self {
        Self::genesis()
    }
}

pub fn compute_entry_hash(
    prev_hash: &Digest,
    envelope: &SignedEnvelope,
) -> Result<Digest, InvalidField> {
    let body = envelope_bytes(envelope)?;
    Ok(Digest::of(&[prev_hash.as_bytes(), &body]))
}

/// Links `envelope` onto the chain described by `state`. The caller is
/// responsible for having authenticated the envelope.
pub fn append(
    state: &ChainState,
    envelope: SignedEnvelope,
) -> Result<(ChainedRecord, ChainState), InvalidField> {
    let entry_hash = compute_entry_hash(&state.head_hash, &envelope)?;
    let record = ChainedRecord {
        sequence: state.length,
        prev_hash: state.head_hash,
        entry_hash,
        envelope,
    };
    let next = ChainState {
        head_hash: entry_hash,
        length: state.length + 1,
    };
    Ok((record, next))
}

/// An externally retained witness of an earlier chain state, e.g. from an
/// append receipt. Either part may be absent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChainWitness {
    pub head: Option<Digest>,
    pub length: Option<u64>,
}

impl From<ChainState> for ChainWitness {
    fn from(state: ChainState) -> Self {
        ChainWitness {
            head: Some(state.head_hash),
            length: Some(state.length),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureClass {
    Altered,
    RemovedOrTruncated,
    FakeInserted,
    Purged,
    BrokenLink,
}

impl FailureClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureClass::Altered => "altered",
            FailureClass::RemovedOrTruncated => "removed-or-truncated",
            FailureClass::FakeInserted => "fake-inserted",
            FailureClass::Purged => "purged",
            FailureClass::BrokenLink => "broken-link",
        }
    }
}

impl fmt::Display for FailureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureLocation {
    Sequence(u64),
    Head,
    Length,
}

impl fmt::Display for FailureLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureLocation::Sequence(n) => write!(f, "{n}"),
            FailureLocation::Head => f.write_str("head"),
            FailureLocation::Length => f.write_str("length"),
        }
    }
}

impl Serialize for FailureLocation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            FailureLocation::Sequence(n) => serializer.serialize_u64(*n),
            FailureLocation::Head => serializer.serialize_str("head"),
            FailureLocation::Length => serializer.serialize_str("length"),
        }
    }
}

impl<'de> Deserialize<'de> for FailureLocation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Seq(u64),
            Name(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Seq(n) => Ok(FailureLocation::Sequence(n)),
            Raw::Name(s) if s == "head" => Ok(FailureLocation::Head),
            Raw::Name(s) if s == "length" => Ok(FailureLocation::Length),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("unknown location `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub location: FailureLocation,
    pub class: FailureClass,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn from_failures(failures: Vec<Failure>) -> Self {
        VerificationReport {
            ok: failures.is_empty(),
            failures,
        }
    }

    pub fn has(&self, location: FailureLocation, class: FailureClass) -> bool {
        self.failures
            .iter()
            .any(|f| f.location == location && f.class == class)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("chain ok");
        }
        writeln!(f, "chain verification FAILED ({} problems)", self.failures.len())?;
        for failure in &self.failures {
            writeln!(f, "  {} at {}: {}", failure.class, failure.location, failure.detail)?;
        }
        Ok(())
    }
}

/// Checks hash recomputation, link continuity from genesis, envelope
/// signatures against `tools`, and, if given, consistency with an earlier
/// witnessed state. The chain may have grown past the witness.
pub fn verify_chain(
    records: &[ChainedRecord],
    tools: &ToolRegistry,
    expected: Option<&ChainWitness>,
) -> VerificationReport {
    let mut failures = Vec::new();
    let mut push = |location, class, detail: String| {
        failures.push(Failure {
            location,
            class,
            detail,
        })
    };

    let mut next_sequence = 0u64;
    let mut prev = Digest::GENESIS;
    for record in records {
        let at = FailureLocation::Sequence(record.sequence);
        let mut link_reported = false;
        if record.sequence > next_sequence {
            push(
                FailureLocation::Sequence(next_sequence),
                FailureClass::RemovedOrTruncated,
                format!(
                    "records {next_sequence}..{} are missing",
                    record.sequence
                ),
            );
            link_reported = true;
        } else if record.sequence < next_sequence {
            push(
                at,
                FailureClass::BrokenLink,
                format!("sequence {} repeats or goes backwards", record.sequence),
            );
            link_reported = true;
        }

        match compute_entry_hash(&record.prev_hash, &record.envelope) {
            Ok(hash) if hash == record.entry_hash => match tools.check_signature(&record.envelope) {
                Ok(()) => {}
                Err(Rejection::UnknownTool) => push(
                    at,
                    FailureClass::FakeInserted,
                    format!("tool `{}` is not registered", record.envelope.tool_id()),
                ),
                Err(reason) => push(
                    at,
                    FailureClass::FakeInserted,
                    format!("envelope signature does not verify ({reason})"),
                ),
            },
            Ok(_) => push(
                at,
                FailureClass::Altered,
                "entry hash does not match record contents".into(),
            ),
            Err(e) => push(at, FailureClass::Altered, format!("record contents invalid: {e}")),
        }

        if !link_reported && record.prev_hash != prev {
            push(
                at,
                FailureClass::BrokenLink,
                "prev_hash does not match the preceding entry hash".into(),
            );
        }
        prev = record.entry_hash;
        next_sequence = next_sequence.max(record.sequence + 1);
    }

    if let Some(witness) = expected {
        check_witness(records, witness, &mut push);
    }

    VerificationReport::from_failures(failures)
}

fn check_witness(
    records: &[ChainedRecord],
    witness: &ChainWitness,
    push: &mut impl FnMut(FailureLocation, FailureClass, String),
) {
    let actual_len = records.len() as u64;
    let witnessed_nonempty = witness.length.is_some_and(|l| l > 0)
        || witness.head.is_some_and(|h| !h.is_genesis());
    if records.is_empty() && witnessed_nonempty {
        let location = if witness.length.is_some() {
            FailureLocation::Length
        } else {
            FailureLocation::Head
        };
        push(
            location,
            FailureClass::Purged,
            "log is empty but a non-empty state was witnessed".into(),
        );
        return;
    }

    if let Some(length) = witness.length {
        if actual_len < length {
            push(
                FailureLocation::Length,
                FailureClass::RemovedOrTruncated,
                format!("{actual_len} records present, witnessed length {length}"),
            );
        }
    }

    if let Some(head) = witness.head {
        let hash_at = |len: u64| -> Option<Digest> {
            match len {
                0 => Some(Digest::GENESIS),
                n => records.get(n as usize - 1).map(|r| r.entry_hash),
            }
        };
        match witness.length {
            Some(length) => match hash_at(length) {
                Some(found) if found == head => {}
                Some(_) => push(
                    FailureLocation::Head,
                    FailureClass::BrokenLink,
                    format!("entry hash at length {length} differs from witnessed head {head}"),
                ),
                None => push(
                    FailureLocation::Head,
                    FailureClass::RemovedOrTruncated,
                    format!("witnessed head {head} is beyond the end of the log"),
                ),
            },
            None => {
                let present =
                    head.is_genesis() || records.iter().any(|r| r.entry_hash == head);
                if !present {
                    push(
                        FailureLocation::Head,
                        FailureClass::RemovedOrTruncated,
                        format!("witnessed head {head} is not in the log"),
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auth::{generate_signing_key, sign_envelope, PublicKey};
    use crate::time::Timestamp;

    fn envelope(key: &ed25519_dalek::SigningKey, i: u32) -> SignedEnvelope {
        let entry = UsageLogEntry {
            entry_id: format!("e-{i}"),
            responsible: "lead@example.com".into(),
            tool: "jira".into(),
            kind: "access".into(),
            justification: format!("review {i}"),
            data_types: vec!["user_name".into()],
            owners: vec!["dev@example.com".into()],
            timestamp: Timestamp::from_unix(1_700_000_000 + i as i64),
        };
        sign_envelope(key, entry, "jira", Timestamp::from_unix(1_700_000_000)).unwrap()
    }

    fn build(n: u32) -> (Vec<ChainedRecord>, ToolRegistry) {
        let key = generate_signing_key();
        let mut tools = ToolRegistry::new();
        tools
            .register("jira", PublicKey(key.verifying_key()), Timestamp::from_unix(0))
            .unwrap();
        let mut state = ChainState::genesis();
        let mut records = Vec::new();
        for i in 0..n {
            let (record, next) = append(&state, envelope(&key, i)).unwrap();
            records.push(record);
            state = next;
        }
        (records, tools)
    }

    #[test]
    fn genesis_record() {
        let (records, _) = build(1);
        assert_eq!(records[0].sequence, 0);
        assert_eq!(records[0].prev_hash, Digest::GENESIS);
    }

    #[test]
    fn link_rule() {
        let (records, _) = build(3);
        assert_eq!(records[2].sequence, 2);
        assert_eq!(records[2].prev_hash, records[1].entry_hash);
        assert_eq!(ChainState::of(&records).head_hash, records[2].entry_hash);
        assert_eq!(ChainState::of(&records).length, 3);
    }

    #[test]
    fn empty_chain_verifies() {
        let report = verify_chain(&[], &ToolRegistry::new(), None);
        assert!(report.ok);
        let witness = ChainWitness::from(ChainState::genesis());
        assert!(verify_chain(&[], &ToolRegistry::new(), Some(&witness)).ok);
    }

    #[test]
    fn untampered_chain_verifies_with_witness() {
        let (records, tools) = build(50);
        let witness = ChainWitness::from(ChainState::of(&records));
        let report = verify_chain(&records, &tools, Some(&witness));
        assert!(report.ok, "{report}");
    }

    #[test]
    fn chain_may_grow_past_witness() {
        let (records, tools) = build(10);
        let witness = ChainWitness::from(ChainState::of(&records[..6]));
        assert!(verify_chain(&records, &tools, Some(&witness)).ok);
    }

    #[test]
    fn reordering_is_a_broken_link() {
        let (mut records, tools) = build(5);
        records.swap(1, 2);
        let report = verify_chain(&records, &tools, None);
        assert!(!report.ok);
        assert!(report
            .failures
            .iter()
            .all(|f| f.class == FailureClass::BrokenLink || f.class == FailureClass::RemovedOrTruncated));
    }

    #[test]
    fn unknown_tool_is_fake() {
        let (records, _) = build(2);
        let report = verify_chain(&records, &ToolRegistry::new(), None);
        assert!(report.has(FailureLocation::Sequence(0), FailureClass::FakeInserted));
        assert!(report.has(FailureLocation::Sequence(1), FailureClass::FakeInserted));
    }

    #[test]
    fn location_serializes_as_number_or_name() {
        assert_eq!(serde_json::to_string(&FailureLocation::Sequence(10)).unwrap(), "10");
        assert_eq!(serde_json::to_string(&FailureLocation::Head).unwrap(), "\"head\"");
        let back: FailureLocation = serde_json::from_str("\"length\"").unwrap();
        assert_eq!(back, FailureLocation::Length);
    }

    #[test]
    fn record_json_rejects_inconsistent_entry() {
        let (records, _) = build(1);
        let mut json = serde_json::to_value(&records[0]).unwrap();
        json["entry"]["kind"] = "other".into();
        assert!(serde_json::from_value::<ChainedRecord>(json).is_err());
        let ok = serde_json::to_value(&records[0]).unwrap();
        assert_eq!(serde_json::from_value::<ChainedRecord>(ok).unwrap(), records[0]);
    }
}
