use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use safekeeper_core::{sign_envelope, AppendReceipt, InvalidField, SigningKey, Timestamp, UsageLogEntry};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::transport::{Transport, TransportError};

/// The parts of a usage entry the analysis author knows up front.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageDescriptor {
    pub tool: String,
    pub kind: String,
    pub justification: String,
    pub data_types: Vec<String>,
    pub owners: Vec<String>,
}

impl UsageDescriptor {
    /// The entry for one usage by `consumer` at `now`.
    pub fn to_entry(&self, consumer: &str, now: Timestamp) -> UsageLogEntry {
        UsageLogEntry {
            entry_id: uuid::Uuid::new_v4().to_string(),
            responsible: consumer.to_owned(),
            tool: self.tool.clone(),
            kind: self.kind.clone(),
            justification: self.justification.clone(),
            data_types: self.data_types.clone(),
            owners: self.owners.clone(),
            timestamp: now,
        }
    }

    /// Keeps only declared types that also appear in `present`, in declared
    /// order. If none remain the declared list is kept unchanged.
    pub fn narrowed_to(&self, present: &BTreeSet<String>) -> UsageDescriptor {
        let kept: Vec<String> = self
            .data_types
            .iter()
            .filter(|t| present.contains(*t))
            .cloned()
            .collect();
        UsageDescriptor {
            data_types: if kept.is_empty() { self.data_types.clone() } else { kept },
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    /// Total time allowed across attempts and waits.
    pub budget: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            initial_backoff: Duration::from_millis(200),
            budget: Duration::from_secs(10),
        }
    }
}

impl RetryPolicy {
    pub fn no_backoff() -> Self {
        RetryPolicy {
            initial_backoff: Duration::ZERO,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoggingError {
    #[error("usage logging failed: invalid usage descriptor ({0})")]
    InvalidDescriptor(InvalidField),
    #[error("usage logging failed: descriptor names tool `{descriptor}` but the client signs as `{client}`")]
    ToolMismatch { descriptor: String, client: String },
    #[error("usage logging failed after {attempts} attempt(s); result withheld: {last}")]
    Failed { attempts: u32, last: TransportError },
}

pub type Clock = Arc<dyn Fn() -> Timestamp + Send + Sync>;

/// Signs usage entries as one tool and delivers them. Safe to share
/// between threads.
#[derive(Clone)]
pub struct MonitorClient {
    tool_id: String,
    key: SigningKey,
    transport: Arc<dyn Transport>,
    retry: RetryPolicy,
    clock: Clock,
}

impl MonitorClient {
    pub fn new(tool_id: impl Into<String>, key: SigningKey, transport: Arc<dyn Transport>) -> Self {
        MonitorClient {
            tool_id: tool_id.into(),
            key,
            transport,
            retry: RetryPolicy::default(),
            clock: Arc::new(Timestamp::now),
        }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn tool_id(&self) -> &str {
        &self.tool_id
    }

    pub fn now(&self) -> Timestamp {
        (self.clock)()
    }

    /// Records one usage and returns only once the service has durably
    /// stored it. Every attempt is signed afresh with a new nonce. Nothing
    /// is buffered: on failure the usage is simply not logged and the caller
    /// must withhold the result.
    pub fn log_usage(&self, descriptor: &UsageDescriptor, consumer: &str) -> Result<AppendReceipt, LoggingError> {
        if descriptor.tool != self.tool_id {
            return Err(LoggingError::ToolMismatch {
                descriptor: descriptor.tool.clone(),
                client: self.tool_id.clone(),
            });
        }
        let started = Instant::now();
        let mut backoff = self.retry.initial_backoff;
        let mut attempt = 0;
        loop {
            attempt += 1;
            let now = self.now();
            let entry = descriptor.to_entry(consumer, now);
            let envelope = sign_envelope(&self.key, entry, &self.tool_id, now)
                .map_err(LoggingError::InvalidDescriptor)?;
            let err = match self.transport.submit(&envelope) {
                Ok(receipt) => return Ok(receipt),
                Err(e) => e,
            };
            let out_of_time = started.elapsed() + backoff >= self.retry.budget;
            if !err.is_retryable() || attempt >= self.retry.max_attempts || out_of_time {
                tracing::warn!(tool = %self.tool_id, attempt, error = %err, "usage logging failed");
                return Err(LoggingError::Failed { attempts: attempt, last: err });
            }
            tracing::debug!(tool = %self.tool_id, attempt, error = %err, "retrying usage log");
            std::thread::sleep(backoff);
            backoff *= 2;
        }
    }
}
