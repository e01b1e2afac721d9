//! Deliberate corruption of a data directory, reproducing the five attacks
//! on a usage log so that detection can be tested end to end. Nothing in the
//! service calls this; the CLI exposes it only behind `--unsafe-test`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use safekeeper_core::auth::generate_signing_key;
use safekeeper_core::chain::compute_entry_hash;
use safekeeper_core::{sign_envelope, ChainState, ChainedRecord, Digest};
use serde::Serialize;
use thiserror::Error;

use crate::store::{self, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attack {
    /// Change one byte of an entry in place.
    Alter,
    /// Delete one record, leaving its neighbours untouched.
    Remove,
    /// Splice in an entry signed with a key the registry does not know, and
    /// re-link the rest of the chain around it.
    InsertFake,
    /// Drop records from the end.
    Truncate,
    /// Delete every record.
    Purge,
}

impl Attack {
    pub const ALL: [Attack; 5] = [
        Attack::Alter,
        Attack::Remove,
        Attack::InsertFake,
        Attack::Truncate,
        Attack::Purge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Attack::Alter => "alter",
            Attack::Remove => "remove",
            Attack::InsertFake => "insert-fake",
            Attack::Truncate => "truncate",
            Attack::Purge => "purge",
        }
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Attack {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Attack::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown attack `{s}` (alter, remove, insert-fake, truncate, purge)"))
    }
}

#[derive(Debug, Error)]
pub enum TamperError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("store has {len} records; position {position} is out of range")]
    OutOfRange { position: u64, len: u64 },
    #[error("store is empty; nothing to {0}")]
    Empty(Attack),
    #[error("store has undecodable records; refusing to tamper further")]
    Corrupt,
}

#[derive(Debug, Clone, Serialize)]
pub struct TamperOutcome {
    pub attack: Attack,
    /// Chain state before the attack, usable as a verification witness.
    pub before: ChainState,
    pub records_after: u64,
    pub description: String,
}

/// Applies `attack` to the records in `dir`. `position` is the target
/// sequence for alter, remove and insert-fake (default: the middle record)
/// and the number of records to drop for truncate (default: 1).
pub fn apply_attack(dir: &Path, attack: Attack, position: Option<u64>) -> Result<TamperOutcome, TamperError> {
    let loaded = store::read_records(dir)?;
    if !loaded.corrupt.is_empty() {
        return Err(TamperError::Corrupt);
    }
    let mut records = loaded.records;
    let len = records.len() as u64;
    let before = ChainState::of(&records);
    if len == 0 {
        return Err(TamperError::Empty(attack));
    }
    let target = position.unwrap_or(len / 2);
    let in_range = |p: u64| {
        if p < len {
            Ok(p as usize)
        } else {
            Err(TamperError::OutOfRange { position: p, len })
        }
    };

    let description = match attack {
        Attack::Alter => {
            let idx = in_range(target)?;
            let entry = &mut records[idx].envelope.payload.entry;
            let field = if alter_one_byte(&mut entry.justification).is_some() {
                "justification"
            } else if alter_one_byte(&mut entry.kind).is_some() {
                "kind"
            } else {
                // Non-empty by invariant; appending keeps the record decodable.
                entry.entry_id.push('x');
                "entry_id"
            };
            format!("altered the {field} of record {target}")
        }
        Attack::Remove => {
            let idx = in_range(target)?;
            records.remove(idx);
            format!("removed record {target}")
        }
        Attack::InsertFake => {
            let idx = in_range(target)?;
            let template = &records[idx].envelope;
            let mut entry = template.entry().clone();
            entry.entry_id = format!("{}-forged", entry.entry_id);
            entry.justification = "routine check".into();
            let rogue = generate_signing_key();
            let forged = sign_envelope(&rogue, entry, template.tool_id(), template.payload.sent_at)
                .expect("template entry is valid");
            records.insert(
                idx,
                ChainedRecord {
                    sequence: target,
                    prev_hash: Digest::GENESIS,
                    entry_hash: Digest::GENESIS,
                    envelope: forged,
                },
            );
            relink_from(&mut records, idx);
            format!("inserted a forged record at sequence {target} and re-linked the chain after it")
        }
        Attack::Truncate => {
            let count = position.unwrap_or(1).min(len);
            records.truncate((len - count) as usize);
            format!("dropped the last {count} records")
        }
        Attack::Purge => {
            records.clear();
            format!("deleted all {len} records")
        }
    };

    store::rewrite_records(dir, &records)?;
    Ok(TamperOutcome {
        attack,
        before,
        records_after: records.len() as u64,
        description,
    })
}

/// Toggles the lowest bit of the first ASCII byte, keeping valid UTF-8.
fn alter_one_byte(s: &mut String) -> Option<()> {
    let mut bytes = std::mem::take(s).into_bytes();
    let pos = bytes.iter().position(u8::is_ascii_alphanumeric);
    if let Some(p) = pos {
        bytes[p] ^= 0x01;
    }
    *s = String::from_utf8(bytes).expect("ASCII toggle keeps UTF-8 valid");
    pos.map(|_| ())
}

/// Recomputes sequence numbers, links and hashes from `from` onwards, as an
/// attacker with write access to the file would.
fn relink_from(records: &mut [ChainedRecord], from: usize) {
    let mut prev = if from == 0 {
        Digest::GENESIS
    } else {
        records[from - 1].entry_hash
    };
    for (i, record) in records.iter_mut().enumerate().skip(from) {
        record.sequence = i as u64;
        record.prev_hash = prev;
        record.entry_hash = compute_entry_hash(&prev, &record.envelope).expect("valid envelope");
        prev = record.entry_hash;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attack_names_round_trip() {
        for a in Attack::ALL {
            assert_eq!(a.as_str().parse::<Attack>().unwrap(), a);
        }
        assert!("drop-table".parse::<Attack>().is_err());
    }

    #[test]
    fn alter_one_byte_changes_exactly_one_byte() {
        let mut s = String::from("  weekly report");
        let before = s.clone().into_bytes();
        alter_one_byte(&mut s).unwrap();
        let diff = before.iter().zip(s.as_bytes()).filter(|(a, b)| a != b).count();
        assert_eq!(diff, 1);
        let mut empty = String::new();
        assert!(alter_one_byte(&mut empty).is_none());
    }
}
