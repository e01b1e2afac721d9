//! A transport wrapper that injects failures, for exercising fail-closed
//! behaviour.

use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex};

use safekeeper_core::{AppendReceipt, SignedEnvelope};
use serde::Serialize;

use crate::transport::{Transport, TransportError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultKind {
    /// Nothing is sent; the connection fails.
    Unreachable,
    /// Nothing is sent; the request times out.
    Timeout,
    /// The service answers with a 4xx rejection.
    Rejected,
    /// The service answers with a 5xx storage failure.
    ServerError,
    /// The entry is delivered and stored but the receipt never arrives.
    ResponseLost,
}

impl FaultKind {
    pub const ALL: [FaultKind; 5] = [
        FaultKind::Unreachable,
        FaultKind::Timeout,
        FaultKind::Rejected,
        FaultKind::ServerError,
        FaultKind::ResponseLost,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FaultPlan {
    pub kind: FaultKind,
    /// 1-based index of the first failing call.
    pub at_call: u32,
    /// Keep failing on every later call too.
    pub persistent: bool,
}

pub struct FaultyTransport {
    inner: Arc<dyn Transport>,
    plan: Mutex<Option<FaultPlan>>,
    calls: AtomicU32,
    delivered: AtomicU32,
}

impl FaultyTransport {
    pub fn new(inner: Arc<dyn Transport>) -> Self {
        FaultyTransport {
            inner,
            plan: Mutex::new(None),
            calls: AtomicU32::new(0),
            delivered: AtomicU32::new(0),
        }
    }

    pub fn set_plan(&self, plan: Option<FaultPlan>) {
        *self.plan.lock().unwrap_or_else(|e| e.into_inner()) = plan;
        self.calls.store(0, Ordering::SeqCst);
        self.delivered.store(0, Ordering::SeqCst);
    }

    pub fn calls(&self) -> u32 {
        self.calls.load(Ordering::SeqCst)
    }

    /// Calls that reached the inner transport.
    pub fn delivered(&self) -> u32 {
        self.delivered.load(Ordering::SeqCst)
    }
}

impl Transport for FaultyTransport {
    fn submit(&self, envelope: &SignedEnvelope) -> Result<AppendReceipt, TransportError> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
        let plan = *self.plan.lock().unwrap_or_else(|e| e.into_inner());
        let fault = plan.filter(|p| call == p.at_call || (p.persistent && call > p.at_call));
        let Some(FaultPlan { kind, .. }) = fault else {
            self.delivered.fetch_add(1, Ordering::SeqCst);
            return self.inner.submit(envelope);
        };
        match kind {
            FaultKind::Unreachable => Err(TransportError::Unreachable("injected: connection refused".into())),
            FaultKind::Timeout => Err(TransportError::Timeout),
            FaultKind::Rejected => Err(TransportError::Rejected {
                status: 400,
                code: "malformed".into(),
                message: "injected rejection".into(),
            }),
            FaultKind::ServerError => Err(TransportError::Server {
                status: 503,
                code: "storage-failure".into(),
                message: "injected storage failure".into(),
            }),
            FaultKind::ResponseLost => {
                self.delivered.fetch_add(1, Ordering::SeqCst);
                let _ = self.inner.submit(envelope);
                Err(TransportError::Timeout)
            }
        }
    }
}
