//! Running analyses behind usage logging.

use std::collections::BTreeSet;

use safekeeper_core::analytics::{CommitHours, MentionNetwork, SupporterRanking};
use safekeeper_core::AppendReceipt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{LoggingError, MonitorClient, UsageDescriptor};
use crate::report::{select_and_report, ReportCache, Selected};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LoggingMode {
    /// Log when the analysis is requested, then run it.
    OnRequest,
    /// Run, log the data types the result actually carries, then release.
    OnResult,
    /// Log when a report is first generated; reopening it logs nothing.
    OncePerReport,
}

/// Data-type labels carried by an analysis result, used to narrow what an
/// `OnResult` guard logs.
pub trait DataTypeLabels {
    fn data_types(&self) -> BTreeSet<String>;
}

fn labels(present: bool, names: &[&str]) -> BTreeSet<String> {
    if present {
        names.iter().map(|s| s.to_string()).collect()
    } else {
        BTreeSet::new()
    }
}

impl DataTypeLabels for CommitHours {
    fn data_types(&self) -> BTreeSet<String> {
        labels(!self.per_author.is_empty(), &["user_name", "commit_time"])
    }
}

impl DataTypeLabels for SupporterRanking {
    fn data_types(&self) -> BTreeSet<String> {
        labels(!self.ranking.is_empty(), &["user_name", "reviews_performed"])
    }
}

impl DataTypeLabels for MentionNetwork {
    fn data_types(&self) -> BTreeSet<String> {
        labels(!self.edges.is_empty(), &["user_name", "message_mentions"])
    }
}

#[derive(Debug, Error)]
pub enum GuardError {
    #[error(transparent)]
    Logging(#[from] LoggingError),
    #[error("a report needs at least one selected analysis")]
    EmptySelection,
    #[error("once-per-report logging needs a report cache")]
    MissingCache,
}

/// An analysis result released by a guard, with the receipt that allowed
/// its release (`None` when served from a report cache).
#[derive(Debug, Clone, PartialEq)]
pub struct Guarded<R> {
    pub result: R,
    pub receipt: Option<AppendReceipt>,
}

/// Runs `analysis` for `consumer` under `mode`. No result leaves this
/// function unless its usage has been durably logged.
pub fn guarded_run<R, F>(
    client: &MonitorClient,
    consumer: &str,
    descriptor: &UsageDescriptor,
    mode: LoggingMode,
    cache: Option<&ReportCache>,
    analysis: F,
) -> Result<Guarded<R>, GuardError>
where
    R: DataTypeLabels + Serialize + DeserializeOwned + Clone,
    F: FnOnce() -> R,
{
    match mode {
        LoggingMode::OnRequest => {
            let receipt = client.log_usage(descriptor, consumer)?;
            Ok(Guarded {
                result: analysis(),
                receipt: Some(receipt),
            })
        }
        LoggingMode::OnResult => {
            let result = analysis();
            let logged = descriptor.narrowed_to(&result.data_types());
            let receipt = client.log_usage(&logged, consumer)?;
            Ok(Guarded {
                result,
                receipt: Some(receipt),
            })
        }
        LoggingMode::OncePerReport => {
            let cache = cache.ok_or(GuardError::MissingCache)?;
            let report = select_and_report(
                client,
                consumer,
                vec![Selected::new("result", descriptor.clone(), analysis)],
                cache,
            )?;
            let receipt = (!report.from_cache).then(|| report.receipts[0]);
            let (_, result) = report.sections.into_iter().next().expect("one section");
            Ok(Guarded { result, receipt })
        }
    }
}
