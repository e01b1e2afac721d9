//! JSON bodies of the Safekeeper HTTP protocol (see `docs/PROTOCOL.md`).

use serde::{Deserialize, Serialize};

use crate::auth::PublicKey;
use crate::chain::ChainState;
use crate::digest::Digest;
use crate::query::{QueryFilter, DEFAULT_PAGE_SIZE};
use crate::time::Timestamp;

/// Response to `POST /api/log`: the appended record's position and the
/// chain state right after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppendReceipt {
    pub sequence: u64,
    pub entry_hash: Digest,
    pub head_hash: Digest,
    pub length: u64,
}

impl AppendReceipt {
    pub fn chain_state(&self) -> ChainState {
        ChainState {
            head_hash: self.head_hash,
            length: self.length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterToolRequest {
    pub tool_id: String,
    pub verification_key: PublicKey,
}

/// Query-string parameters of `GET /api/log`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub responsible: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page_size: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub page_index: Option<u32>,
}

impl QueryParams {
    pub fn into_filter(self) -> QueryFilter {
        let non_empty = |s: Option<String>| s.filter(|s| !s.is_empty());
        QueryFilter {
            owner: non_empty(self.owner),
            responsible: non_empty(self.responsible),
            tool: non_empty(self.tool),
            kind: non_empty(self.kind),
            text: non_empty(self.text),
            from: self.from.map(Timestamp::from_unix),
            to: self.to.map(Timestamp::from_unix),
            page_size: self.page_size.unwrap_or(DEFAULT_PAGE_SIZE),
            page_index: self.page_index.unwrap_or(0),
        }
    }

    /// `key=value` pairs in declaration order, for building URLs.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        push("owner", self.owner.clone());
        push("responsible", self.responsible.clone());
        push("tool", self.tool.clone());
        push("kind", self.kind.clone());
        push("text", self.text.clone());
        push("from", self.from.map(|v| v.to_string()));
        push("to", self.to.map(|v| v.to_string()));
        push("page_size", self.page_size.map(|v| v.to_string()));
        push("page_index", self.page_index.map(|v| v.to_string()));
        out
    }
}
