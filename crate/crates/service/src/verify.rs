//! Offline verification of a data directory.

use std::path::Path;

use safekeeper_core::{
    verify_chain, ChainWitness, Failure, FailureClass, FailureLocation, ToolRegistry,
    VerificationReport,
};
use serde::Serialize;

use crate::store::{self, LoadedRecords, StoreError};

/// Chain verification plus undecodable frames, which count as altered
/// records at their frame position.
pub fn verify_loaded(
    loaded: &LoadedRecords,
    tools: &ToolRegistry,
    expected: Option<&ChainWitness>,
) -> VerificationReport {
    let chain = verify_chain(&loaded.records, tools, expected);
    if loaded.corrupt.is_empty() {
        return chain;
    }
    let mut failures: Vec<Failure> = loaded
        .corrupt
        .iter()
        .map(|c| Failure {
            location: FailureLocation::Sequence(c.index),
            class: FailureClass::Altered,
            detail: format!("record at byte {} does not decode: {}", c.offset, c.reason),
        })
        .collect();
    // The undecodable frame also shows up as a gap in the sequence; that
    // gap is the same problem, not a removal.
    let corrupt_at = |loc: FailureLocation| {
        loaded
            .corrupt
            .iter()
            .any(|c| loc == FailureLocation::Sequence(c.index))
    };
    failures.extend(
        chain
            .failures
            .into_iter()
            .filter(|f| !(f.class == FailureClass::RemovedOrTruncated && corrupt_at(f.location))),
    );
    VerificationReport::from_failures(failures)
}

#[derive(Debug, Clone, Serialize)]
pub struct StoreVerification {
    pub report: VerificationReport,
    pub records: u64,
    /// Bytes of an interrupted final write, ignored by verification.
    pub torn_tail_bytes: u64,
}

pub fn verify_dir(dir: &Path, expected: Option<&ChainWitness>) -> Result<StoreVerification, StoreError> {
    let tools = store::read_tools(dir)?;
    let loaded = store::read_records(dir)?;
    Ok(StoreVerification {
        report: verify_loaded(&loaded, &tools, expected),
        records: loaded.records.len() as u64,
        torn_tail_bytes: loaded.torn_tail,
    })
}
