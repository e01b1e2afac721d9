#![allow(dead_code)]

pub mod sweep;

use std::sync::Arc;

use monitor_sdk::{ApiClient, FaultyTransport, HttpTransport, MonitorClient, RetryPolicy, UsageDescriptor};
use safekeeper_core::auth::generate_signing_key;
use safekeeper_core::wire::QueryParams;
use safekeeper_core::{ChainedRecord, Principal, PrincipalTable, PublicKey, Role, SigningKey};
use safekeeper_service::{Safekeeper, ServerHandle, Settings, SystemClock};

pub const ADMIN: &str = "admin-token";

pub struct Live {
    pub dir: tempfile::TempDir,
    pub app: Arc<Safekeeper>,
    pub server: Option<ServerHandle>,
    pub url: String,
}

impl Live {
    pub fn start() -> Live {
        let dir = tempfile::tempdir().unwrap();
        let table = PrincipalTable::new([Principal {
            subject: "admin".into(),
            role: Role::Admin,
            token: ADMIN.into(),
        }])
        .unwrap();
        let app = Arc::new(Safekeeper::open(dir.path(), table, Settings::default(), Arc::new(SystemClock)).unwrap());
        let server = ServerHandle::start(app.clone(), "127.0.0.1:0".parse().unwrap()).unwrap();
        let url = server.url();
        Live {
            dir,
            app,
            server: Some(server),
            url,
        }
    }

    pub fn register(&self, tool: &str) -> SigningKey {
        let key = generate_signing_key();
        ApiClient::new(&self.url, Some(ADMIN.into()))
            .register_tool(tool, PublicKey(key.verifying_key()))
            .unwrap();
        key
    }

    pub fn client(&self, tool: &str) -> MonitorClient {
        let key = self.register(tool);
        MonitorClient::new(tool, key, Arc::new(HttpTransport::new(&self.url))).with_retry(RetryPolicy::no_backoff())
    }

    pub fn faulty_client(&self, tool: &str) -> (MonitorClient, Arc<FaultyTransport>) {
        let key = self.register(tool);
        let faulty = Arc::new(FaultyTransport::new(Arc::new(HttpTransport::new(&self.url))));
        let client = MonitorClient::new(tool, key, faulty.clone()).with_retry(RetryPolicy::no_backoff());
        (client, faulty)
    }

    /// Stored records for `consumer`, read straight from the service state.
    pub fn records_for(&self, consumer: &str) -> Vec<ChainedRecord> {
        self.app
            .records()
            .into_iter()
            .filter(|r| r.entry().responsible == consumer)
            .collect()
    }

    pub fn count(&self) -> u64 {
        ApiClient::new(&self.url, Some(ADMIN.into()))
            .query(&QueryParams { page_size: Some(1), ..Default::default() })
            .unwrap()
            .total
    }

    pub fn stop(&mut self) {
        if let Some(s) = self.server.take() {
            s.stop().unwrap();
        }
    }
}

pub fn descriptor(tool: &str, data_types: &[&str]) -> UsageDescriptor {
    UsageDescriptor {
        tool: tool.into(),
        kind: "aggregation".into(),
        justification: "Summarize how many pages were created per user".into(),
        data_types: data_types.iter().map(|s| s.to_string()).collect(),
        owners: vec!["dev01@example.com".into(), "dev02@example.com".into()],
    }
}
