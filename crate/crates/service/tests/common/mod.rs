#![allow(dead_code)]

use std::sync::Arc;
use std::time::Duration;

use safekeeper_core::auth::generate_signing_key;
use safekeeper_core::{
    sign_envelope, Principal, PrincipalTable, PublicKey, Role, SignedEnvelope, SigningKey,
    Timestamp, UsageLogEntry,
};
use safekeeper_service::{Clock, FixedClock, Safekeeper, ServerHandle, Settings};
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const NOW: Timestamp = Timestamp::from_unix(1_700_000_000);
pub const ADMIN: &str = "admin-token";

pub fn principals() -> Vec<Principal> {
    let mut out = vec![Principal {
        subject: "admin".into(),
        role: Role::Admin,
        token: ADMIN.into(),
    }];
    for i in 0..4 {
        out.push(Principal {
            subject: owner(i),
            role: Role::Owner,
            token: format!("owner-{i}"),
        });
        out.push(Principal {
            subject: consumer(i),
            role: Role::Consumer,
            token: format!("consumer-{i}"),
        });
    }
    out
}

pub fn owner(i: usize) -> String {
    format!("dev{i}@example.com")
}

pub fn consumer(i: usize) -> String {
    format!("lead{i}@example.com")
}

pub fn entry(id: usize, owners: &[String], responsible: &str, ts: Timestamp) -> UsageLogEntry {
    UsageLogEntry {
        entry_id: format!("e{id}"),
        responsible: responsible.into(),
        tool: "jira".into(),
        kind: ["access", "aggregation"][id % 2].into(),
        justification: format!("sprint review {id}"),
        data_types: vec!["user_name".into(), "reviews_performed".into()],
        owners: owners.to_vec(),
        timestamp: ts,
    }
}

pub struct TestService {
    pub dir: tempfile::TempDir,
    pub clock: Arc<FixedClock>,
    pub app: Arc<Safekeeper>,
    pub server: Option<ServerHandle>,
    pub key: SigningKey,
    pub agent: ureq::Agent,
}

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(10)))
        .build()
        .into()
}

impl TestService {
    pub fn start() -> TestService {
        Self::start_with(Settings::default())
    }

    pub fn start_with(settings: Settings) -> TestService {
        let dir = tempfile::tempdir().unwrap();
        let clock = Arc::new(FixedClock::new(NOW));
        let app = Arc::new(
            Safekeeper::open(
                dir.path(),
                PrincipalTable::new(principals()).unwrap(),
                settings,
                clock.clone(),
            )
            .unwrap(),
        );
        let key = generate_signing_key();
        let admin = app.authenticate(Some(ADMIN)).unwrap();
        app.register_tool(&admin, "jira", PublicKey(key.verifying_key()))
            .unwrap();
        let server = ServerHandle::start(app.clone(), "127.0.0.1:0".parse().unwrap()).unwrap();
        TestService {
            dir,
            clock,
            app,
            server: Some(server),
            key,
            agent: agent(),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.server.as_ref().unwrap().url())
    }

    pub fn sign(&self, entry: UsageLogEntry) -> SignedEnvelope {
        sign_envelope(&self.key, entry, "jira", self.clock.now()).unwrap()
    }

    pub fn post<B: Serialize>(&self, path: &str, token: Option<&str>, body: &B) -> (u16, serde_json::Value) {
        let mut req = self.agent.post(&self.url(path));
        if let Some(t) = token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let resp = req.send_json(body).unwrap();
        let status = resp.status().as_u16();
        (status, resp.into_body().read_json().unwrap())
    }

    pub fn post_raw(&self, path: &str, body: &[u8]) -> (u16, serde_json::Value) {
        let resp = self
            .agent
            .post(&self.url(path))
            .header("Content-Type", "application/json")
            .send(body)
            .unwrap();
        let status = resp.status().as_u16();
        (status, resp.into_body().read_json().unwrap())
    }

    pub fn get(&self, path: &str, token: Option<&str>, query: &[(&str, String)]) -> (u16, serde_json::Value) {
        let mut req = self.agent.get(&self.url(path));
        if let Some(t) = token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        for (k, v) in query {
            req = req.query(*k, v);
        }
        let resp = req.call().unwrap();
        let status = resp.status().as_u16();
        (status, resp.into_body().read_json().unwrap())
    }

    pub fn get_ok<T: DeserializeOwned>(&self, path: &str, token: &str, query: &[(&str, String)]) -> T {
        let (status, body) = self.get(path, Some(token), query);
        assert_eq!(status, 200, "{body}");
        serde_json::from_value(body).unwrap()
    }
}
