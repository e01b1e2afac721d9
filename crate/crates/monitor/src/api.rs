//! Bearer-token client for the read and admin side of the protocol.

use std::time::Duration;

use safekeeper_core::wire::{QueryParams, RegisterToolRequest};
use safekeeper_core::{ChainState, OverviewStats, Page, PublicKey, ToolIdentity};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::transport::{agent, error_from_response, map_ureq_error, TransportError};

pub struct ApiClient {
    base_url: String,
    token: Option<String>,
    agent: ureq::Agent,
}

impl ApiClient {
    pub fn new(base_url: impl Into<String>, token: Option<String>) -> Self {
        ApiClient {
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            token,
            agent: agent(Duration::from_secs(10)),
        }
    }

    fn auth(&self) -> Option<String> {
        self.token.as_ref().map(|t| format!("Bearer {t}"))
    }

    fn finish<T: DeserializeOwned>(
        resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>,
    ) -> Result<T, TransportError> {
        let resp = resp.map_err(map_ureq_error)?;
        let status = resp.status().as_u16();
        let body = resp.into_body().read_to_string().map_err(map_ureq_error)?;
        if (200..300).contains(&status) {
            serde_json::from_str(&body).map_err(|e| TransportError::Protocol(e.to_string()))
        } else {
            Err(error_from_response(status, &body))
        }
    }

    fn get<T: DeserializeOwned>(&self, path: &str, query: &[(&str, String)]) -> Result<T, TransportError> {
        let mut req = self.agent.get(&format!("{}{path}", self.base_url));
        if let Some(auth) = self.auth() {
            req = req.header("Authorization", &auth);
        }
        for (k, v) in query {
            req = req.query(*k, v);
        }
        Self::finish(req.call())
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T, TransportError> {
        let mut req = self.agent.post(&format!("{}{path}", self.base_url));
        if let Some(auth) = self.auth() {
            req = req.header("Authorization", &auth);
        }
        Self::finish(req.send_json(body))
    }

    pub fn query(&self, params: &QueryParams) -> Result<Page, TransportError> {
        let pairs = params.pairs();
        let pairs: Vec<(&str, String)> = pairs.into_iter().collect();
        self.get("/api/log", &pairs)
    }

    pub fn overview(&self) -> Result<OverviewStats, TransportError> {
        self.get("/api/overview", &[])
    }

    pub fn chain_head(&self) -> Result<ChainState, TransportError> {
        self.get("/api/chain/head", &[])
    }

    pub fn register_tool(&self, tool_id: &str, key: PublicKey) -> Result<ToolIdentity, TransportError> {
        self.post(
            "/api/tools",
            &RegisterToolRequest {
                tool_id: tool_id.to_owned(),
                verification_key: key,
            },
        )
    }

    pub fn tools(&self) -> Result<Vec<ToolIdentity>, TransportError> {
        self.get("/api/tools", &[])
    }
}
