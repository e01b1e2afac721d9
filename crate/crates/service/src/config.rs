//! TOML service configuration.
//!
//! ```toml
//! listen = "127.0.0.1:8700"
//! data_dir = "/var/lib/safekeeper"
//! skew_window_secs = 300        # optional
//! nonce_retention_secs = 86400  # optional
//! page_size_cap = 500           # optional
//!
//! [[principals]]
//! subject = "demo@example.com"
//! role = "owner"
//! token = "..."
//! ```
//!
//! `SAFEKEEPER_LISTEN` and `SAFEKEEPER_DATA_DIR` override the file.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use safekeeper_core::auth::{DEFAULT_NONCE_RETENTION_SECS, DEFAULT_SKEW_WINDOW_SECS};
use safekeeper_core::{Principal, PrincipalTable, ReplayPolicy};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ENV_LISTEN: &str = "SAFEKEEPER_LISTEN";
pub const ENV_DATA_DIR: &str = "SAFEKEEPER_DATA_DIR";
pub const DEFAULT_PAGE_SIZE_CAP: u32 = 500;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid listen address `{0}`")]
    Listen(String),
    #[error("data directory {path} is not writable: {source}")]
    DataDir {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("principals: {0}")]
    Principals(String),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

fn default_skew() -> u64 {
    DEFAULT_SKEW_WINDOW_SECS
}
fn default_retention() -> u64 {
    DEFAULT_NONCE_RETENTION_SECS
}
fn default_cap() -> u32 {
    DEFAULT_PAGE_SIZE_CAP
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: String,
    pub data_dir: PathBuf,
    #[serde(default = "default_skew")]
    pub skew_window_secs: u64,
    #[serde(default = "default_retention")]
    pub nonce_retention_secs: u64,
    #[serde(default = "default_cap")]
    pub page_size_cap: u32,
    #[serde(default)]
    pub principals: Vec<Principal>,
}

impl ServiceConfig {
    pub fn new(listen: impl Into<String>, data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            listen: listen.into(),
            data_dir: data_dir.into(),
            skew_window_secs: DEFAULT_SKEW_WINDOW_SECS,
            nonce_retention_secs: DEFAULT_NONCE_RETENTION_SECS,
            page_size_cap: DEFAULT_PAGE_SIZE_CAP,
            principals: Vec::new(),
        }
    }

    /// Reads the file and applies environment overrides.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Self::parse(&text).map_err(|message| ConfigError::Parse {
            path: path.to_owned(),
            message,
        })?;
        config.apply_overrides(|k| std::env::var(k).ok());
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply_overrides(&mut self, lookup: impl Fn(&str) -> Option<String>) {
        if let Some(listen) = lookup(ENV_LISTEN).filter(|s| !s.is_empty()) {
            self.listen = listen;
        }
        if let Some(dir) = lookup(ENV_DATA_DIR).filter(|s| !s.is_empty()) {
            self.data_dir = PathBuf::from(dir);
        }
    }

    pub fn listen_addr(&self) -> Result<SocketAddr, ConfigError> {
        self.listen
            .parse()
            .map_err(|_| ConfigError::Listen(self.listen.clone()))
    }

    pub fn replay_policy(&self) -> ReplayPolicy {
        ReplayPolicy {
            skew_window_secs: self.skew_window_secs,
            nonce_retention_secs: self.nonce_retention_secs,
        }
    }

    pub fn principal_table(&self) -> Result<PrincipalTable, ConfigError> {
        PrincipalTable::new(self.principals.iter().cloned())
            .map_err(|e| ConfigError::Principals(e.to_string()))
    }

    /// Checks everything that can be checked before binding: address syntax,
    /// unique tokens, positive limits, and a writable data directory (created
    /// if missing).
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.listen_addr()?;
        self.principal_table()?;
        if self.page_size_cap == 0 {
            return Err(ConfigError::NonPositive("page_size_cap"));
        }
        if self.nonce_retention_secs == 0 {
            return Err(ConfigError::NonPositive("nonce_retention_secs"));
        }
        let data_dir_err = |source| ConfigError::DataDir {
            path: self.data_dir.clone(),
            source,
        };
        fs::create_dir_all(&self.data_dir).map_err(data_dir_err)?;
        let probe = self.data_dir.join(".write-probe");
        fs::write(&probe, b"").map_err(data_dir_err)?;
        let _ = fs::remove_file(probe);
        Ok(())
    }
}
