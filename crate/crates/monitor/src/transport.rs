use std::time::Duration;

use safekeeper_core::wire::ErrorBody;
use safekeeper_core::{AppendReceipt, SignedEnvelope};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("safekeeper unreachable: {0}")]
    Unreachable(String),
    #[error("timed out waiting for the safekeeper")]
    Timeout,
    #[error("safekeeper rejected the entry ({status} {code}): {message}")]
    Rejected {
        status: u16,
        code: String,
        message: String,
    },
    #[error("safekeeper failed to store the entry ({status} {code}): {message}")]
    Server {
        status: u16,
        code: String,
        message: String,
    },
    #[error("unexpected safekeeper response: {0}")]
    Protocol(String),
}

impl TransportError {
    /// Whether another attempt might succeed. Rejections are final: the
    /// same entry would be rejected again.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            TransportError::Unreachable(_) | TransportError::Timeout | TransportError::Server { .. }
        )
    }
}

/// Delivers one signed envelope and returns the service's receipt.
pub trait Transport: Send + Sync {
    fn submit(&self, envelope: &SignedEnvelope) -> Result<AppendReceipt, TransportError>;
}

pub(crate) fn agent(timeout: Duration) -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(timeout))
        .build()
        .into()
}

pub(crate) fn map_ureq_error(e: ureq::Error) -> TransportError {
    match e {
        ureq::Error::Timeout(_) => TransportError::Timeout,
        ureq::Error::Json(e) => TransportError::Protocol(e.to_string()),
        other => TransportError::Unreachable(other.to_string()),
    }
}

/// Turns a non-success response into a typed error.
pub(crate) fn error_from_response(status: u16, body: &str) -> TransportError {
    let (code, message) = match serde_json::from_str::<ErrorBody>(body) {
        Ok(b) => (b.error, b.message),
        Err(_) => (String::new(), body.chars().take(200).collect()),
    };
    if status >= 500 {
        TransportError::Server {
            status,
            code,
            message,
        }
    } else {
        TransportError::Rejected {
            status,
            code,
            message,
        }
    }
}

/// `POST {base}/api/log` over HTTP.
pub struct HttpTransport {
    base_url: String,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(3);

    pub fn new(base_url: impl Into<String>) -> Self {
        Self::with_timeout(base_url, Self::DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(base_url: impl Into<String>, timeout: Duration) -> Self {
        HttpTransport {
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            agent: agent(timeout),
        }
    }
}

impl Transport for HttpTransport {
    fn submit(&self, envelope: &SignedEnvelope) -> Result<AppendReceipt, TransportError> {
        let resp = self
            .agent
            .post(&format!("{}/api/log", self.base_url))
            .send_json(envelope)
            .map_err(map_ureq_error)?;
        let status = resp.status().as_u16();
        let body = resp
            .into_body()
            .read_to_string()
            .map_err(map_ureq_error)?;
        if status == 200 {
            serde_json::from_str(&body).map_err(|e| TransportError::Protocol(e.to_string()))
        } else {
            Err(error_from_response(status, &body))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes() {
        let body = r#"{"error":"replayed-nonce","message":"x"}"#;
        let e = error_from_response(409, body);
        assert!(matches!(&e, TransportError::Rejected { code, .. } if code == "replayed-nonce"));
        assert!(!e.is_retryable());
        let e = error_from_response(503, "{\"error\":\"storage-failure\",\"message\":\"disk\"}");
        assert!(e.is_retryable());
        let e = error_from_response(502, "<html>bad gateway</html>");
        assert!(matches!(e, TransportError::Server { status: 502, .. }));
        assert!(TransportError::Timeout.is_retryable());
        assert!(!TransportError::Protocol("x".into()).is_retryable());
    }

    #[test]
    fn unreachable_service() {
        // Port 9 on loopback is essentially never listening.
        let t = HttpTransport::with_timeout("http://127.0.0.1:9", Duration::from_millis(500));
        let key = safekeeper_core::auth::generate_signing_key();
        let entry = safekeeper_core::UsageLogEntry {
            entry_id: "e".into(),
            responsible: "c".into(),
            tool: "t".into(),
            kind: "access".into(),
            justification: String::new(),
            data_types: vec!["d".into()],
            owners: vec!["o".into()],
            timestamp: safekeeper_core::Timestamp::from_unix(0),
        };
        let env = safekeeper_core::sign_envelope(&key, entry, "t", safekeeper_core::Timestamp::from_unix(0)).unwrap();
        let err = t.submit(&env).unwrap_err();
        assert!(err.is_retryable(), "{err:?}");
    }
}
