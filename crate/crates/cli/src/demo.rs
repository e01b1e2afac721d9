//! End-to-end demo: a live service in this process, the three demo tools
//! logging through it, and the owners' overviews at the end.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Arc, Mutex};

use monitor_sdk::demo::{run_demo, DemoClients, DemoOutcome, DEMO_TOOLS, GIT_ANALYZER, JIRA_SUPPORTER, SLACK_NETWORK};
use monitor_sdk::{ApiClient, HttpTransport, MonitorClient, ReportCache, Transport, TransportError};
use safekeeper_core::analytics::{demo_plan, generate_fixture, FixtureSize};
use safekeeper_core::auth::{generate_signing_key, read_signing_key, write_key_pair};
use safekeeper_core::{
    AppendReceipt, Digest, OverviewStats, Principal, PrincipalTable, PublicKey, Role, SignedEnvelope, SigningKey,
};
use safekeeper_service::{Safekeeper, ServerHandle, Settings, SystemClock};
use serde::Serialize;

use crate::args::DemoArgs;
use crate::commands::startup_error;
use crate::exit::{CliError, CliResult};
use crate::output::{self, Output};

const KEYS_DIR: &str = "keys";
const CACHE_DIR: &str = "report-cache";

#[derive(Debug, Serialize)]
pub struct OwnerOverview {
    pub owner: String,
    pub stats: OverviewStats,
}

#[derive(Debug, Serialize)]
pub struct DemoSummary {
    pub seed: u64,
    pub url: String,
    pub entries_before: u64,
    pub entries_after: u64,
    /// Entries this run added, per tool.
    pub added_per_tool: BTreeMap<String, u64>,
    pub outcome: DemoOutcome,
    pub overviews: Vec<OwnerOverview>,
}

/// Random bearer token, valid only for this demo run.
fn ephemeral_token() -> String {
    Digest::of(&[generate_signing_key().as_bytes()]).to_hex()
}

fn tool_key(dir: &Path, tool: &str) -> CliResult<(SigningKey, bool)> {
    let path = dir.join(format!("{tool}.key"));
    if path.exists() {
        return Ok((read_signing_key(&path).map_err(CliError::general)?, false));
    }
    let key = generate_signing_key();
    write_key_pair(dir, tool, &key).map_err(CliError::general)?;
    Ok((key, true))
}

/// Stops the service once a given number of entries has been stored, to
/// show that the demo aborts instead of showing unlogged results. The
/// counter is shared by the three tools' transports.
struct StopAfter {
    inner: HttpTransport,
    remaining: Arc<AtomicU32>,
    server: Arc<Mutex<Option<ServerHandle>>>,
}

impl Transport for StopAfter {
    fn submit(&self, envelope: &SignedEnvelope) -> Result<AppendReceipt, TransportError> {
        let receipt = self.inner.submit(envelope)?;
        let before = self
            .remaining
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
            .unwrap_or(0);
        if before == 1 {
            if let Some(server) = self.server.lock().unwrap_or_else(|e| e.into_inner()).take() {
                tracing::warn!("stopping the safekeeper as requested");
                let _ = server.stop();
            }
        }
        Ok(receipt)
    }
}

pub fn demo(args: &DemoArgs) -> CliResult<Output> {
    let dir = &args.data_dir;
    let keys_dir = dir.join(KEYS_DIR);
    fs::create_dir_all(&keys_dir).map_err(CliError::general)?;

    let fixture = generate_fixture(args.seed, FixtureSize::default());
    let plan = demo_plan(args.seed, &fixture);

    let admin_token = ephemeral_token();
    let owner_tokens: Vec<(String, String)> =
        fixture.owners.iter().map(|o| (o.clone(), ephemeral_token())).collect();
    let mut principals = vec![Principal {
        subject: "demo-admin".into(),
        role: Role::Admin,
        token: admin_token.clone(),
    }];
    principals.extend(owner_tokens.iter().map(|(owner, token)| Principal {
        subject: owner.clone(),
        role: Role::Owner,
        token: token.clone(),
    }));
    let table = PrincipalTable::new(principals).map_err(CliError::general)?;

    let app = Arc::new(
        Safekeeper::open(dir, table, Settings::default(), Arc::new(SystemClock)).map_err(startup_error)?,
    );
    let addr = args
        .listen
        .parse()
        .map_err(|e| CliError::usage(format!("--listen {}: {e}", args.listen)))?;
    let server = ServerHandle::start(app.clone(), addr).map_err(CliError::general)?;
    let url = server.url();
    let server = Arc::new(Mutex::new(Some(server)));
    let entries_before = app.state().length;

    let admin = ApiClient::new(&url, Some(admin_token));
    let registered: Vec<String> = admin.tools()?.into_iter().map(|t| t.tool_id).collect();
    let stop_after = args.stop_service_after.map(|n| Arc::new(AtomicU32::new(n)));
    let mut clients = BTreeMap::new();
    for tool in DEMO_TOOLS {
        let (key, fresh) = tool_key(&keys_dir, tool)?;
        if fresh || !registered.iter().any(|t| t == tool) {
            admin.register_tool(tool, PublicKey(key.verifying_key()))?;
        }
        let transport: Arc<dyn Transport> = match &stop_after {
            Some(remaining) => Arc::new(StopAfter {
                inner: HttpTransport::new(&url),
                remaining: remaining.clone(),
                server: server.clone(),
            }),
            None => Arc::new(HttpTransport::new(&url)),
        };
        clients.insert(tool, MonitorClient::new(tool, key, transport));
    }
    let mut take = |tool| clients.remove(tool).expect("client per demo tool");
    let clients = DemoClients {
        git: take(GIT_ANALYZER),
        jira: take(JIRA_SUPPORTER),
        slack: take(SLACK_NETWORK),
    };
    let cache = ReportCache::on_disk(&dir.join(CACHE_DIR)).map_err(CliError::general)?;

    let outcome = run_demo(&plan, &fixture, &clients, &cache)?;

    let mut overviews = Vec::new();
    for (owner, token) in &owner_tokens {
        let stats = ApiClient::new(&url, Some(token.clone())).overview()?;
        overviews.push(OwnerOverview {
            owner: owner.clone(),
            stats,
        });
    }
    let records = app.records();
    let mut added_per_tool: BTreeMap<String, u64> = DEMO_TOOLS.iter().map(|t| (t.to_string(), 0)).collect();
    for r in &records[entries_before as usize..] {
        *added_per_tool.entry(r.envelope.tool_id().to_owned()).or_default() += 1;
    }
    if let Some(server) = server.lock().unwrap_or_else(|e| e.into_inner()).take() {
        server.stop().map_err(CliError::general)?;
    }

    let summary = DemoSummary {
        seed: args.seed,
        url,
        entries_before,
        entries_after: records.len() as u64,
        added_per_tool,
        outcome,
        overviews,
    };
    let human = render(&summary);
    Ok(Output::new(&summary, human))
}

fn render(s: &DemoSummary) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "demo seed {} against {}", s.seed, s.url);
    for session in &s.outcome.sessions {
        let _ = writeln!(
            out,
            "  {}: report opened {}x ({}), supporter {}, network {}x -> {} entries",
            session.consumer,
            session.report_opens,
            if session.report_generated { "generated" } else { "cached" },
            if session.supporter_revealed { "revealed" } else { "hidden" },
            session.network_triggers,
            session.entries
        );
    }
    let _ = writeln!(
        out,
        "log: {} -> {} entries ({} added)",
        s.entries_before,
        s.entries_after,
        s.entries_after - s.entries_before
    );
    for (tool, n) in &s.added_per_tool {
        let _ = writeln!(out, "  {tool}: +{n}");
    }
    if let Some(ranking) = &s.outcome.supporter_ranking {
        let top: Vec<String> = ranking.ranking.iter().take(3).map(|r| format!("{} ({})", r.reviewer, r.reviews)).collect();
        let _ = writeln!(out, "top supporters: {}", top.join(", "));
    }
    if let Some(network) = &s.outcome.mention_network {
        let _ = writeln!(out, "mention network: {} edges", network.edges.len());
    }
    if let Some(hours) = &s.outcome.commit_hours {
        let _ = writeln!(out, "commit hours: {} authors", hours.per_author.len());
    }
    for o in &s.overviews {
        let _ = writeln!(out, "\noverview for {}", o.owner);
        out.push_str(&output::overview(&o.stats));
    }
    out
}
