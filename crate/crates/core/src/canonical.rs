//! Canonical byte encoding of envelopes and chained records.
//!
//! All integers are big-endian. `str(x)` is a `u32` byte length followed by
//! the UTF-8 bytes, `list(xs)` is a `u32` item count followed by `str` of
//! each item.
//!
//! ```text
//! payload  = str("safekeeper/envelope/v1")
//!            str(entry_id) str(responsible) str(tool) str(kind) str(justification)
//!            list(data_types) list(owners) i64(timestamp)
//!            str(tool_id) nonce[16] i64(sent_at)
//! envelope = payload  u32(len) signature[len]
//! record   = u64(sequence) prev_hash[32] entry_hash[32] envelope
//! ```
//!
//! Signatures cover `payload`; chain hashes cover `prev_hash || envelope`.

use crate::digest::Digest;
use crate::entry::UsageLogEntry;
use crate::envelope::{EnvelopePayload, Nonce, SignedEnvelope};
use crate::error::{DecodeError, InvalidField};
use crate::time::Timestamp;

pub const ENVELOPE_TAG: &str = "safekeeper/envelope/v1";

/// Canonical bytes of a payload, the input to signing.
pub fn canonicalize(payload: &EnvelopePayload) -> Result<Vec<u8>, InvalidField> {
    payload.entry.validate()?;
    crate::entry::require_non_empty("tool_id", &payload.tool_id)?;
    let mut out = Vec::with_capacity(256);
    write_payload(&mut out, payload);
    Ok(out)
}

/// Canonical bytes of a full envelope (payload followed by signature),
/// the per-record input to the chain hash.
pub fn envelope_bytes(envelope: &SignedEnvelope) -> Result<Vec<u8>, InvalidField> {
    let mut out = canonicalize(&envelope.payload)?;
    write_bytes(&mut out, &envelope.signature);
    Ok(out)
}

pub fn encode_record(
    sequence: u64,
    prev_hash: &Digest,
    entry_hash: &Digest,
    envelope: &SignedEnvelope,
) -> Result<Vec<u8>, InvalidField> {
    let body = envelope_bytes(envelope)?;
    let mut out = Vec::with_capacity(72 + body.len());
    out.extend_from_slice(&sequence.to_be_bytes());
    out.extend_from_slice(prev_hash.as_bytes());
    out.extend_from_slice(entry_hash.as_bytes());
    out.extend_from_slice(&body);
    Ok(out)
}

/// Decoded record fields, in encoding order.
pub type RecordParts = (u64, Digest, Digest, SignedEnvelope);

pub fn decode_record(bytes: &[u8]) -> Result<RecordParts, DecodeError> {
    let mut r = Reader::new(bytes);
    let sequence = u64::from_be_bytes(r.array()?);
    let prev_hash = Digest(r.array()?);
    let entry_hash = Digest(r.array()?);
    let envelope = read_envelope(&mut r)?;
    r.finish()?;
    Ok((sequence, prev_hash, entry_hash, envelope))
}

pub fn decode_envelope(bytes: &[u8]) -> Result<SignedEnvelope, DecodeError> {
    let mut r = Reader::new(bytes);
    let envelope = read_envelope(&mut r)?;
    r.finish()?;
    Ok(envelope)
}

fn write_payload(out: &mut Vec<u8>, payload: &EnvelopePayload) {
    let e = &payload.entry;
    write_str(out, ENVELOPE_TAG);
    write_str(out, &e.entry_id);
    write_str(out, &e.responsible);
    write_str(out, &e.tool);
    write_str(out, &e.kind);
    write_str(out, &e.justification);
    write_list(out, &e.data_types);
    write_list(out, &e.owners);
    out.extend_from_slice(&e.timestamp.as_unix().to_be_bytes());
    write_str(out, &payload.tool_id);
    out.extend_from_slice(&payload.nonce.0);
    out.extend_from_slice(&payload.sent_at.as_unix().to_be_bytes());
}

fn write_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn write_str(out: &mut Vec<u8>, s: &str) {
    write_bytes(out, s.as_bytes());
}

fn write_list(out: &mut Vec<u8>, items: &[String]) {
    out.extend_from_slice(&(items.len() as u32).to_be_bytes());
    for item in items {
        write_str(out, item);
    }
}

fn read_envelope(r: &mut Reader<'_>) -> Result<SignedEnvelope, DecodeError> {
    if r.string()? != ENVELOPE_TAG {
        return Err(DecodeError::BadTag);
    }
    let entry = UsageLogEntry {
        entry_id: r.string()?,
        responsible: r.string()?,
        tool: r.string()?,
        kind: r.string()?,
        justification: r.string()?,
        data_types: r.list()?,
        owners: r.list()?,
        timestamp: Timestamp::from_unix(i64::from_be_bytes(r.array()?)),
    };
    let tool_id = r.string()?;
    let nonce = Nonce(r.array()?);
    let sent_at = Timestamp::from_unix(i64::from_be_bytes(r.array()?));
    let signature = r.bytes()?.to_vec();
    entry.validate()?;
    crate::entry::require_non_empty("tool_id", &tool_id)?;
    Ok(SignedEnvelope {
        payload: EnvelopePayload {
            entry,
            tool_id,
            nonce,
            sent_at,
        },
        signature,
    })
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.buf.len())
            .ok_or(DecodeError::Truncated(self.pos))?;
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], DecodeError> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N)?);
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    fn bytes(&mut self) -> Result<&'a [u8], DecodeError> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    fn string(&mut self) -> Result<String, DecodeError> {
        let bytes = self.bytes()?;
        std::str::from_utf8(bytes)
            .map(str::to_owned)
            .map_err(|_| DecodeError::Utf8)
    }

    fn list(&mut self) -> Result<Vec<String>, DecodeError> {
        let count = self.u32()? as usize;
        // Each item needs at least its 4-byte length prefix.
        if count > (self.buf.len() - self.pos) / 4 {
            return Err(DecodeError::Truncated(self.pos));
        }
        (0..count).map(|_| self.string()).collect()
    }

    fn finish(self) -> Result<(), DecodeError> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            n => Err(DecodeError::Trailing(n)),
        }
    }
}
