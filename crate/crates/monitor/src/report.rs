//! Reports assembled from explicitly selected analyses, logged once before
//! any of them runs and cached so that reopening logs nothing.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use safekeeper_core::{AppendReceipt, Digest, Timestamp};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::client::{MonitorClient, UsageDescriptor};
use crate::guard::GuardError;

/// One analysis chosen for a report.
pub struct Selected<'a, R> {
    pub name: String,
    pub descriptor: UsageDescriptor,
    analysis: Box<dyn FnOnce() -> R + 'a>,
}

impl<'a, R> Selected<'a, R> {
    pub fn new(name: impl Into<String>, descriptor: UsageDescriptor, analysis: impl FnOnce() -> R + 'a) -> Self {
        Selected {
            name: name.into(),
            descriptor,
            analysis: Box::new(analysis),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub key: String,
    pub sections: Vec<(String, R)>,
    /// One receipt per selected analysis, from when the report was generated.
    pub receipts: Vec<AppendReceipt>,
    /// Client time after the last receipt, when the analyses began.
    pub processing_started: Timestamp,
    #[serde(skip)]
    pub from_cache: bool,
}

/// Generated reports by key, in memory and optionally mirrored to a
/// directory so that they survive restarts.
#[derive(Debug, Default)]
pub struct ReportCache {
    dir: Option<PathBuf>,
    entries: Mutex<HashMap<String, serde_json::Value>>,
    generating: Mutex<()>,
}

impl ReportCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn on_disk(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ReportCache {
            dir: Some(dir.to_owned()),
            ..Default::default()
        })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    fn get<R: DeserializeOwned>(&self, key: &str) -> Option<Report<R>> {
        let cached = self.entries.lock().unwrap_or_else(|e| e.into_inner()).get(key).cloned();
        let value = match cached {
            Some(v) => v,
            None => {
                let bytes = fs::read(self.path(key)?).ok()?;
                serde_json::from_slice(&bytes).ok()?
            }
        };
        // An unreadable entry counts as absent; regenerating only logs again.
        serde_json::from_value(value).ok()
    }

    fn put<R: Serialize>(&self, report: &Report<R>) -> io::Result<()> {
        let value = serde_json::to_value(report).map_err(io::Error::other)?;
        if let Some(path) = self.path(&report.key) {
            let tmp = path.with_extension("json.tmp");
            fs::write(&tmp, serde_json::to_vec_pretty(&value).map_err(io::Error::other)?)?;
            fs::rename(&tmp, &path)?;
        }
        self.entries
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(report.key.clone(), value);
        Ok(())
    }

    pub fn len(&self) -> usize {
        match &self.dir {
            Some(dir) => fs::read_dir(dir)
                .map(|it| {
                    it.filter_map(Result::ok)
                        .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
                        .count()
                })
                .unwrap_or(0),
            None => self.entries.lock().unwrap_or_else(|e| e.into_inner()).len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Identifies a report by who generated it and what was selected.
pub fn report_key(consumer: &str, selection: &[(&str, &UsageDescriptor)]) -> String {
    let canonical = serde_json::to_vec(&(consumer, selection)).expect("serializable");
    Digest::of(&[b"safekeeper/report/v1".as_slice(), canonical.as_slice()]).to_hex()
}

/// Logs one usage per selected analysis, and only after every receipt has
/// arrived runs the analyses. A report generated earlier for the same
/// consumer and selection is returned from `cache` without logging.
pub fn select_and_report<R>(
    client: &MonitorClient,
    consumer: &str,
    selection: Vec<Selected<'_, R>>,
    cache: &ReportCache,
) -> Result<Report<R>, GuardError>
where
    R: Serialize + DeserializeOwned,
{
    if selection.is_empty() {
        return Err(GuardError::EmptySelection);
    }
    let key = report_key(
        consumer,
        &selection
            .iter()
            .map(|s| (s.name.as_str(), &s.descriptor))
            .collect::<Vec<_>>(),
    );
    let _generating = cache.generating.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(mut report) = cache.get::<R>(&key) {
        report.from_cache = true;
        return Ok(report);
    }

    let mut receipts = Vec::with_capacity(selection.len());
    for s in &selection {
        receipts.push(client.log_usage(&s.descriptor, consumer)?);
    }
    let processing_started = client.now();
    let sections = selection
        .into_iter()
        .map(|s| (s.name, (s.analysis)()))
        .collect();
    let report = Report {
        key,
        sections,
        receipts,
        processing_started,
        from_cache: false,
    };
    if let Err(e) = cache.put(&report) {
        // The usage is logged; failing to cache only means a reopen logs again.
        tracing::warn!(error = %e, "could not cache report");
    }
    Ok(report)
}
