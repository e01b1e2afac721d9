//! Tool registration, envelope signatures (Ed25519), replay protection and
//! principal roles.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::canonical::canonicalize;
use crate::entry::UsageLogEntry;
use crate::envelope::{EnvelopePayload, Nonce, SignedEnvelope};
use crate::error::InvalidField;
use crate::time::Timestamp;

/// Maximum accepted distance between `sent_at` and the receiver's clock.
pub const DEFAULT_SKEW_WINDOW_SECS: u64 = 300;
/// How long accepted nonces are remembered.
pub const DEFAULT_NONCE_RETENTION_SECS: u64 = 24 * 60 * 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    UnknownTool,
    InvalidSignature,
    StaleTimestamp,
    ReplayedNonce,
    Malformed,
}

impl Rejection {
    pub fn code(self) -> &'static str {
        match self {
            Rejection::UnknownTool => "unknown-tool",
            Rejection::InvalidSignature => "invalid-signature",
            Rejection::StaleTimestamp => "stale-timestamp",
            Rejection::ReplayedNonce => "replayed-nonce",
            Rejection::Malformed => "malformed",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl std::error::Error for Rejection {}

#[derive(Debug, Error)]
pub enum KeyError {
    #[error("key file {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("key is not 32 hex-encoded bytes")]
    Encoding,
    #[error("bytes do not form a valid Ed25519 public key")]
    InvalidPublicKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("tool `{0}` is already registered")]
    DuplicateTool(String),
    #[error("tool id must not be empty")]
    EmptyToolId,
}

/// Ed25519 public key carried as lowercase hex.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct PublicKey(pub VerifyingKey);

impl PublicKey {
    pub fn from_hex(s: &str) -> Result<PublicKey, KeyError> {
        let mut bytes = [0u8; 32];
        hex::decode_to_slice(s.trim(), &mut bytes).map_err(|_| KeyError::Encoding)?;
        VerifyingKey::from_bytes(&bytes)
            .map(PublicKey)
            .map_err(|_| KeyError::InvalidPublicKey)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0.as_bytes())
    }
}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", self.to_hex())
    }
}

impl Serialize for PublicKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for PublicKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        PublicKey::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

pub fn generate_signing_key() -> SigningKey {
    let mut seed = [0u8; 32];
    rand::rngs::OsRng.fill_bytes(&mut seed);
    SigningKey::from_bytes(&seed)
}

/// Key files hold a single line: 64 lowercase hex characters (the 32-byte
/// Ed25519 seed for `.key`, the 32-byte public key for `.pub`) followed by
/// a newline. Surrounding whitespace is ignored when reading.
pub fn write_key_pair(dir: &Path, name: &str, key: &SigningKey) -> Result<(), KeyError> {
    let write = |file: String, contents: String| {
        let path = dir.join(file);
        fs::write(&path, contents).map_err(|source| KeyError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    write(format!("{name}.key"), format!("{}\n", hex::encode(key.to_bytes())))?;
    write(
        format!("{name}.pub"),
        format!("{}\n", hex::encode(key.verifying_key().as_bytes())),
    )
}

pub fn read_signing_key(path: &Path) -> Result<SigningKey, KeyError> {
    let text = read_key_text(path)?;
    let mut seed = [0u8; 32];
    hex::decode_to_slice(text.trim(), &mut seed).map_err(|_| KeyError::Encoding)?;
    Ok(SigningKey::from_bytes(&seed))
}

pub fn read_public_key(path: &Path) -> Result<PublicKey, KeyError> {
    PublicKey::from_hex(&read_key_text(path)?)
}

fn read_key_text(path: &Path) -> Result<String, KeyError> {
    fs::read_to_string(path).map_err(|source| KeyError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolIdentity {
    pub tool_id: String,
    pub verification_key: PublicKey,
    pub registered_at: Timestamp,
}

/// Registered tools and their verification keys.
#[derive(Debug, Clone, Default)]
pub struct ToolRegistry {
    tools: BTreeMap<String, ToolIdentity>,
}

impl ToolRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(
        &mut self,
        tool_id: &str,
        key: PublicKey,
        now: Timestamp,
    ) -> Result<ToolIdentity, RegistryError> {
        if tool_id.is_empty() {
            return Err(RegistryError::EmptyToolId);
        }
        if self.tools.contains_key(tool_id) {
            return Err(RegistryError::DuplicateTool(tool_id.to_owned()));
        }
        let identity = ToolIdentity {
            tool_id: tool_id.to_owned(),
            verification_key: key,
            registered_at: now,
        };
        self.tools.insert(tool_id.to_owned(), identity.clone());
        Ok(identity)
    }

    /// Re-inserts a previously persisted identity.
    pub fn restore(&mut self, identity: ToolIdentity) -> Result<(), RegistryError> {
        if self.tools.contains_key(&identity.tool_id) {
            return Err(RegistryError::DuplicateTool(identity.tool_id));
        }
        self.tools.insert(identity.tool_id.clone(), identity);
        Ok(())
    }

    pub fn get(&self, tool_id: &str) -> Option<&ToolIdentity> {
        self.tools.get(tool_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ToolIdentity> {
        self.tools.values()
    }

    pub fn len(&self) -> usize {
        self.tools.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    /// Signature check only: tool known and signature valid over the
    /// canonical payload.
    pub fn check_signature(&self, envelope: &SignedEnvelope) -> Result<(), Rejection> {
        let identity = self
            .get(&envelope.payload.tool_id)
            .ok_or(Rejection::UnknownTool)?;
        let message = canonicalize(&envelope.payload).map_err(|_| Rejection::Malformed)?;
        let signature = Signature::from_slice(&envelope.signature)
            .map_err(|_| Rejection::InvalidSignature)?;
        identity
            .verification_key
            .0
            .verify(&message, &signature)
            .map_err(|_| Rejection::InvalidSignature)
    }
}

pub fn sign_envelope(
    key: &SigningKey,
    entry: UsageLogEntry,
    tool_id: &str,
    now: Timestamp,
) -> Result<SignedEnvelope, InvalidField> {
    let payload = EnvelopePayload {
        entry,
        tool_id: tool_id.to_owned(),
        nonce: Nonce::random(),
        sent_at: now,
    };
    let signature = key.sign(&canonicalize(&payload)?);
    Ok(SignedEnvelope {
        payload,
        signature: signature.to_bytes().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayPolicy {
    pub skew_window_secs: u64,
    pub nonce_retention_secs: u64,
}

impl Default for ReplayPolicy {
    fn default() -> Self {
        ReplayPolicy {
            skew_window_secs: DEFAULT_SKEW_WINDOW_SECS,
            nonce_retention_secs: DEFAULT_NONCE_RETENTION_SECS,
        }
    }
}

/// Accepted `(tool_id, nonce)` pairs with the time they were accepted.
#[derive(Debug, Clone)]
pub struct NonceCache {
    seen: HashMap<(String, Nonce), Timestamp>,
    retention_secs: u64,
}

impl NonceCache {
    pub fn new(retention_secs: u64) -> Self {
        NonceCache {
            seen: HashMap::new(),
            retention_secs,
        }
    }

    pub fn contains(&self, tool_id: &str, nonce: &Nonce) -> bool {
        self.seen.contains_key(&(tool_id.to_owned(), *nonce))
    }

    pub fn insert(&mut self, tool_id: &str, nonce: Nonce, at: Timestamp) {
        self.seen.insert((tool_id.to_owned(), nonce), at);
    }

    /// Removes a nonce whose submission could not be stored.
    pub fn forget(&mut self, tool_id: &str, nonce: &Nonce) {
        self.seen.remove(&(tool_id.to_owned(), *nonce));
    }

    /// Drops nonces older than the retention period.
    pub fn prune(&mut self, now: Timestamp) {
        let cutoff = now.as_unix().saturating_sub(self.retention_secs as i64);
        self.seen.retain(|_, at| at.as_unix() >= cutoff);
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Accepts an envelope iff its tool is registered, the signature is valid,
/// `sent_at` lies within the skew window and the nonce is unseen. On
/// acceptance the nonce is recorded.
pub fn verify_envelope(
    envelope: &SignedEnvelope,
    registry: &ToolRegistry,
    nonces: &mut NonceCache,
    policy: &ReplayPolicy,
    now: Timestamp,
) -> Result<(), Rejection> {
    registry.check_signature(envelope)?;
    let payload = &envelope.payload;
    if payload.sent_at.abs_diff_secs(now) > policy.skew_window_secs {
        return Err(Rejection::StaleTimestamp);
    }
    if nonces.contains(&payload.tool_id, &payload.nonce) {
        return Err(Rejection::ReplayedNonce);
    }
    if nonces.len() > 4096 {
        nonces.prune(now);
    }
    nonces.insert(&payload.tool_id, payload.nonce, now);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Owner,
    Consumer,
    Admin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principal {
    pub subject: String,
    pub role: Role,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrincipalError {
    #[error("duplicate token for subject `{0}`")]
    DuplicateToken(String),
    #[error("empty subject or token")]
    Empty,
}

/// Static bearer-token table.
#[derive(Debug, Clone, Default)]
pub struct PrincipalTable {
    by_token: HashMap<String, Principal>,
}

impl PrincipalTable {
    pub fn new(principals: impl IntoIterator<Item = Principal>) -> Result<Self, PrincipalError> {
        let mut by_token = HashMap::new();
        for p in principals {
            if p.subject.is_empty() || p.token.is_empty() {
                return Err(PrincipalError::Empty);
            }
            if by_token.contains_key(&p.token) {
                return Err(PrincipalError::DuplicateToken(p.subject));
            }
            by_token.insert(p.token.clone(), p);
        }
        Ok(PrincipalTable { by_token })
    }

    pub fn authenticate(&self, token: &str) -> Option<&Principal> {
        self.by_token.get(token)
    }

    pub fn len(&self) -> usize {
        self.by_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_token.is_empty()
    }
}
