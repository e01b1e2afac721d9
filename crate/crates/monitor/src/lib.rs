//! The Monitor: analyses run only behind guards that log their data usage
//! to a Safekeeper first, and withhold results whenever logging fails.

pub mod api;
pub mod client;
pub mod config;
pub mod demo;
pub mod fault;
pub mod gate;
pub mod guard;
pub mod report;
pub mod transport;

pub use api::ApiClient;
pub use client::{LoggingError, MonitorClient, RetryPolicy, UsageDescriptor};
pub use config::MonitorConfig;
pub use fault::{FaultKind, FaultPlan, FaultyTransport};
pub use gate::{AnalysisGate, GateState};
pub use guard::{guarded_run, DataTypeLabels, GuardError, Guarded, LoggingMode};
pub use report::{report_key, select_and_report, Report, ReportCache, Selected};
pub use transport::{HttpTransport, Transport, TransportError};
