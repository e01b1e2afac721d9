//! Core of the Safekeeper usage log: the hash-chained, append-only record
//! of data usages, its integrity checks and queries, envelope signing and
//! replay protection, and the analytics used by the demo tools.

pub mod analytics;
pub mod auth;
pub mod canonical;
pub mod chain;
pub mod digest;
pub mod entry;
pub mod envelope;
pub mod error;
pub mod overview;
pub mod query;
pub mod sample;
pub mod time;
pub mod wire;

pub use auth::{
    sign_envelope, verify_envelope, NonceCache, Principal, PrincipalTable, PublicKey, Rejection,
    ReplayPolicy, Role, ToolIdentity, ToolRegistry,
};
pub use canonical::canonicalize;
pub use chain::{
    append, verify_chain, ChainState, ChainWitness, ChainedRecord, Failure, FailureClass,
    FailureLocation, VerificationReport,
};
pub use digest::Digest;
pub use entry::UsageLogEntry;
pub use error::{DecodeError, InvalidField};
pub use envelope::{EnvelopePayload, Nonce, SignedEnvelope};
pub use overview::{compute_overview, ConsumerCount, OverviewStats};
pub use query::{query, FilterError, Page, QueryFilter};
pub use time::Timestamp;
pub use wire::AppendReceipt;

pub use ed25519_dalek::{SigningKey, VerifyingKey};
