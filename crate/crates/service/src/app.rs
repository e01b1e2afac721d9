//! The Safekeeper application state, independent of any transport.

use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard, PoisonError, RwLock, RwLockReadGuard, RwLockWriteGuard};

use safekeeper_core::auth::verify_envelope;
use safekeeper_core::query::query;
use safekeeper_core::{
    append, compute_overview, AppendReceipt, ChainState, ChainedRecord, FilterError, NonceCache,
    OverviewStats, Page, Principal, PrincipalTable, PublicKey, QueryFilter, Rejection,
    ReplayPolicy, Role, SignedEnvelope, ToolIdentity, ToolRegistry, VerificationReport,
};
use thiserror::Error;

use crate::clock::Clock;
use crate::config::{ConfigError, ServiceConfig, DEFAULT_PAGE_SIZE_CAP};
use crate::store::{self, RecordFile, StoreError};
use crate::verify::verify_loaded;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("submission rejected: {0}")]
    Rejected(Rejection),
    #[error("malformed request: {0}")]
    Malformed(String),
    #[error("invalid filter: {0}")]
    BadFilter(#[from] FilterError),
    #[error("missing or unknown bearer token")]
    Unauthenticated,
    #[error("role `{0:?}` may not perform this operation")]
    Forbidden(Role),
    #[error("tool `{0}` is already registered")]
    DuplicateTool(String),
    #[error("storage failure, entry not recorded: {0}")]
    Storage(String),
}

impl From<Rejection> for ServiceError {
    fn from(r: Rejection) -> Self {
        ServiceError::Rejected(r)
    }
}

impl ServiceError {
    /// Stable machine-readable code carried in error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Rejected(r) => r.code(),
            ServiceError::Malformed(_) => Rejection::Malformed.code(),
            ServiceError::BadFilter(_) => "bad-filter",
            ServiceError::Unauthenticated => "unauthenticated",
            ServiceError::Forbidden(_) => "forbidden",
            ServiceError::DuplicateTool(_) => "duplicate-tool",
            ServiceError::Storage(_) => "storage-failure",
        }
    }
}

#[derive(Debug, Error)]
pub enum StartupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("refusing to serve a store that fails verification:\n{0}")]
    Tampered(VerificationReport),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    pub policy: ReplayPolicy,
    pub page_size_cap: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            policy: ReplayPolicy::default(),
            page_size_cap: DEFAULT_PAGE_SIZE_CAP,
        }
    }
}

struct Writer {
    file: RecordFile,
    nonces: NonceCache,
    state: ChainState,
}

pub struct Safekeeper {
    dir: PathBuf,
    records: RwLock<Vec<ChainedRecord>>,
    writer: Mutex<Writer>,
    tools: RwLock<ToolRegistry>,
    principals: PrincipalTable,
    settings: Settings,
    clock: Arc<dyn Clock>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}
fn read<T>(l: &RwLock<T>) -> RwLockReadGuard<'_, T> {
    l.read().unwrap_or_else(PoisonError::into_inner)
}
fn write<T>(l: &RwLock<T>) -> RwLockWriteGuard<'_, T> {
    l.write().unwrap_or_else(PoisonError::into_inner)
}

impl Safekeeper {
    pub fn from_config(config: &ServiceConfig, clock: Arc<dyn Clock>) -> Result<Self, StartupError> {
        config.validate()?;
        let settings = Settings {
            policy: config.replay_policy(),
            page_size_cap: config.page_size_cap,
        };
        Self::open(&config.data_dir, config.principal_table()?, settings, clock)
    }

    /// Loads the data directory and verifies the whole chain before
    /// accepting anything. A store that fails verification is not served.
    pub fn open(
        dir: &Path,
        principals: PrincipalTable,
        settings: Settings,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, StartupError> {
        let tools = store::read_tools(dir)?;
        let (file, loaded) = RecordFile::open(dir)?;
        let report = verify_loaded(&loaded, &tools, None);
        if !report.ok {
            return Err(StartupError::Tampered(report));
        }
        let records = loaded.records;
        let state = ChainState::of(&records);

        let now = clock.now();
        let mut nonces = NonceCache::new(settings.policy.nonce_retention_secs);
        for record in &records {
            let payload = &record.envelope.payload;
            nonces.insert(&payload.tool_id, payload.nonce, payload.sent_at);
        }
        nonces.prune(now);
        tracing::info!(
            length = state.length,
            head = %state.head_hash,
            tools = tools.len(),
            "store verified"
        );

        Ok(Safekeeper {
            dir: dir.to_owned(),
            records: RwLock::new(records),
            writer: Mutex::new(Writer { file, nonces, state }),
            tools: RwLock::new(tools),
            principals,
            settings,
            clock,
        })
    }

    pub fn data_dir(&self) -> &Path {
        &self.dir
    }

    pub fn now(&self) -> safekeeper_core::Timestamp {
        self.clock.now()
    }

    pub fn authenticate(&self, token: Option<&str>) -> Result<Principal, ServiceError> {
        token
            .and_then(|t| self.principals.authenticate(t))
            .cloned()
            .ok_or(ServiceError::Unauthenticated)
    }

    /// Verifies and appends one envelope. The receipt is returned only once
    /// the record is on stable storage.
    pub fn submit(&self, envelope: SignedEnvelope) -> Result<AppendReceipt, ServiceError> {
        let entry = envelope.entry();
        entry
            .validate()
            .map_err(|e| ServiceError::Malformed(e.to_string()))?;
        if entry.tool != envelope.payload.tool_id {
            return Err(ServiceError::Malformed(
                "entry.tool must equal the signing tool_id".into(),
            ));
        }

        let mut w = lock(&self.writer);
        let now = self.clock.now();
        {
            let tools = read(&self.tools);
            verify_envelope(&envelope, &tools, &mut w.nonces, &self.settings.policy, now)?;
        }
        let tool_id = envelope.payload.tool_id.clone();
        let nonce = envelope.payload.nonce;
        let (record, next) = match append(&w.state, envelope) {
            Ok(v) => v,
            Err(e) => {
                w.nonces.forget(&tool_id, &nonce);
                return Err(ServiceError::Malformed(e.to_string()));
            }
        };
        if let Err(e) = w.file.append(&record) {
            w.nonces.forget(&tool_id, &nonce);
            tracing::error!(error = %e, "append failed; entry not recorded");
            return Err(ServiceError::Storage(e.to_string()));
        }
        let receipt = AppendReceipt {
            sequence: record.sequence,
            entry_hash: record.entry_hash,
            head_hash: next.head_hash,
            length: next.length,
        };
        write(&self.records).push(record);
        w.state = next;
        Ok(receipt)
    }

    /// Runs `filter` within the principal's scope: owners see entries they
    /// own, consumers entries they are responsible for, admins everything.
    pub fn query(&self, principal: &Principal, mut filter: QueryFilter) -> Result<Page, ServiceError> {
        match principal.role {
            Role::Owner => filter.owner = Some(principal.subject.clone()),
            Role::Consumer => filter.responsible = Some(principal.subject.clone()),
            Role::Admin => {}
        }
        filter.page_size = filter.page_size.min(self.settings.page_size_cap);
        let records = read(&self.records);
        Ok(query(records.iter(), &filter)?)
    }

    pub fn overview(&self, principal: &Principal) -> Result<OverviewStats, ServiceError> {
        if principal.role != Role::Owner {
            return Err(ServiceError::Forbidden(principal.role));
        }
        let now = self.clock.now();
        let records = read(&self.records);
        Ok(compute_overview(records.iter(), &principal.subject, now))
    }

    pub fn chain_head(&self, principal: &Principal) -> Result<ChainState, ServiceError> {
        require_admin(principal)?;
        Ok(self.state())
    }

    pub fn state(&self) -> ChainState {
        lock(&self.writer).state
    }

    pub fn register_tool(
        &self,
        principal: &Principal,
        tool_id: &str,
        key: PublicKey,
    ) -> Result<ToolIdentity, ServiceError> {
        require_admin(principal)?;
        // Serialize with submissions so a tool never appears half-registered.
        let _w = lock(&self.writer);
        let mut next = read(&self.tools).clone();
        let identity = next
            .register(tool_id, key, self.clock.now())
            .map_err(|e| match e {
                safekeeper_core::auth::RegistryError::DuplicateTool(t) => ServiceError::DuplicateTool(t),
                other => ServiceError::Malformed(other.to_string()),
            })?;
        store::append_tool(&self.dir, &identity).map_err(|e| ServiceError::Storage(e.to_string()))?;
        *write(&self.tools) = next;
        Ok(identity)
    }

    pub fn tools(&self, principal: &Principal) -> Result<Vec<ToolIdentity>, ServiceError> {
        require_admin(principal)?;
        Ok(read(&self.tools).iter().cloned().collect())
    }

    /// Snapshot of all records, for tests and tooling.
    pub fn records(&self) -> Vec<ChainedRecord> {
        read(&self.records).clone()
    }

    /// Makes every subsequent record write fail, simulating a full or
    /// broken disk.
    pub fn inject_storage_failure(&self, fail: bool) {
        lock(&self.writer).file.set_fail_writes(fail);
    }
}

fn require_admin(principal: &Principal) -> Result<(), ServiceError> {
    if principal.role == Role::Admin {
        Ok(())
    } else {
        Err(ServiceError::Forbidden(principal.role))
    }
}
