//! Explicit activation against ambient usage: an insight stays hidden, and
//! its analysis never runs, until a consumer asks for it and the usage has
//! been logged.

use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::client::{MonitorClient, UsageDescriptor};
use crate::guard::{guarded_run, DataTypeLabels, GuardError, LoggingMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateState {
    Hidden,
    Activated,
}

pub struct AnalysisGate<R> {
    descriptor: UsageDescriptor,
    mode: LoggingMode,
    revealed: Mutex<Option<R>>,
}

impl<R> AnalysisGate<R>
where
    R: DataTypeLabels + Serialize + DeserializeOwned + Clone,
{
    /// `mode` decides what is logged on activation. The gate keeps the
    /// revealed result itself, so `OncePerReport` behaves like `OnRequest`.
    pub fn new(descriptor: UsageDescriptor, mode: LoggingMode) -> Self {
        AnalysisGate {
            descriptor,
            mode: match mode {
                LoggingMode::OncePerReport => LoggingMode::OnRequest,
                m => m,
            },
            revealed: Mutex::new(None),
        }
    }

    pub fn descriptor(&self) -> &UsageDescriptor {
        &self.descriptor
    }

    pub fn state(&self) -> GateState {
        match *self.revealed.lock().unwrap_or_else(|e| e.into_inner()) {
            Some(_) => GateState::Activated,
            None => GateState::Hidden,
        }
    }

    /// The result, if the gate has been activated.
    pub fn revealed(&self) -> Option<R> {
        self.revealed.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Logs the usage, runs the analysis and reveals it. Activating an
    /// already activated gate returns the revealed result without logging.
    /// If logging fails the gate stays hidden.
    pub fn activate<F>(&self, client: &MonitorClient, consumer: &str, analysis: F) -> Result<R, GuardError>
    where
        F: FnOnce() -> R,
    {
        let mut revealed = self.revealed.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(result) = revealed.as_ref() {
            return Ok(result.clone());
        }
        let guarded = guarded_run(client, consumer, &self.descriptor, self.mode, None, analysis)?;
        *revealed = Some(guarded.result.clone());
        Ok(guarded.result)
    }
}
