//! The Safekeeper service: durable storage of the usage-log chain, the
//! HTTP protocol in front of it, and operator tooling for data directories.

pub mod app;
pub mod clock;
pub mod config;
pub mod http;
pub mod server;
pub mod store;
pub mod tamper;
pub mod verify;

pub use app::{Safekeeper, ServiceError, Settings, StartupError};
pub use clock::{Clock, FixedClock, SystemClock};
pub use config::{ConfigError, ServiceConfig};
pub use server::ServerHandle;
pub use tamper::{apply_attack, Attack, TamperError, TamperOutcome};
pub use verify::{verify_dir, StoreVerification};
