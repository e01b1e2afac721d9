use std::path::PathBuf;
use std::sync::Arc;

use safekeeper_core::auth::{read_signing_key, KeyError};
use thiserror::Error;

use crate::client::MonitorClient;
use crate::transport::HttpTransport;

pub const ENV_URL: &str = "SAFEKEEPER_URL";
pub const ENV_TOOL_ID: &str = "MONITOR_TOOL_ID";
pub const ENV_KEY_FILE: &str = "MONITOR_KEY_FILE";

#[derive(Debug, Error)]
pub enum MonitorConfigError {
    #[error("environment variable {0} is not set")]
    Missing(&'static str),
    #[error(transparent)]
    Key(#[from] KeyError),
}

/// Where a tool's Monitor sends entries and which key it signs with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonitorConfig {
    pub safekeeper_url: String,
    pub tool_id: String,
    pub key_file: PathBuf,
}

impl MonitorConfig {
    pub fn from_env() -> Result<Self, MonitorConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, MonitorConfigError> {
        let get = |k: &'static str| lookup(k).filter(|v| !v.is_empty()).ok_or(MonitorConfigError::Missing(k));
        Ok(MonitorConfig {
            safekeeper_url: get(ENV_URL)?,
            tool_id: get(ENV_TOOL_ID)?,
            key_file: PathBuf::from(get(ENV_KEY_FILE)?),
        })
    }

    pub fn client(&self) -> Result<MonitorClient, MonitorConfigError> {
        let key = read_signing_key(&self.key_file)?;
        Ok(MonitorClient::new(
            self.tool_id.clone(),
            key,
            Arc::new(HttpTransport::new(self.safekeeper_url.clone())),
        ))
    }
}
