//! Exhaustive fault-point sweep over every guarded surface of the SDK.
//! Shared with the CLI acceptance target.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;

use monitor_sdk::{
    guarded_run, select_and_report, AnalysisGate, DataTypeLabels, FaultKind, FaultPlan, FaultyTransport,
    GateState, HttpTransport, LoggingMode, MonitorClient, ReportCache, RetryPolicy, Selected, UsageDescriptor,
};
use safekeeper_core::{AppendReceipt, Digest, SigningKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Guard(LoggingMode),
    Gate(LoggingMode),
    /// A report of three selected analyses.
    Report,
}

pub const SURFACES: [Surface; 6] = [
    Surface::Guard(LoggingMode::OnRequest),
    Surface::Guard(LoggingMode::OnResult),
    Surface::Guard(LoggingMode::OncePerReport),
    Surface::Gate(LoggingMode::OnRequest),
    Surface::Gate(LoggingMode::OnResult),
    Surface::Report,
];

/// Log calls a surface makes when nothing fails.
fn clean_calls(surface: Surface) -> u32 {
    match surface {
        Surface::Report => 3,
        _ => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Cols(pub Vec<String>);

impl DataTypeLabels for Cols {
    fn data_types(&self) -> BTreeSet<String> {
        self.0.iter().cloned().collect()
    }
}

pub fn cols() -> Cols {
    Cols(vec!["user_name".into()])
}

fn descriptor(tool: &str, name: &str) -> UsageDescriptor {
    UsageDescriptor {
        tool: tool.into(),
        kind: "aggregation".into(),
        justification: format!("fault sweep: {name}"),
        data_types: vec!["user_name".into(), name.into()],
        owners: vec!["dev01@example.com".into()],
    }
}

#[derive(Debug)]
pub struct CaseOutcome {
    pub surface: Surface,
    pub plan: FaultPlan,
    pub consumer: String,
    pub released: bool,
    /// Receipts backing the released result.
    pub receipts: Vec<AppendReceipt>,
    pub analysis_runs: u32,
    pub gate_state: Option<GateState>,
}

pub struct SweepReport {
    pub cases: Vec<CaseOutcome>,
    pub released: usize,
    pub violations: Vec<String>,
}

/// Runs every surface against every fault kind, at every call index a
/// surface can reach including retries, transient and persistent. `dir` is
/// the data directory of the live service at `url`, read back from disk to
/// check that receipts are durable.
pub fn run_sweep(url: &str, key: SigningKey, tool: &str, dir: &Path) -> SweepReport {
    let faulty = Arc::new(FaultyTransport::new(Arc::new(HttpTransport::new(url))));
    let retry = RetryPolicy::no_backoff();
    let attempts = retry.max_attempts;
    let client = MonitorClient::new(tool, key, faulty.clone()).with_retry(retry);

    let mut cases = Vec::new();
    let mut n = 0;
    for surface in SURFACES {
        // Every attempt of every log call is a fault point.
        let points = clean_calls(surface) * attempts;
        for kind in FaultKind::ALL {
            for at_call in 1..=points {
                for persistent in [false, true] {
                    n += 1;
                    let plan = FaultPlan { kind, at_call, persistent };
                    faulty.set_plan(Some(plan));
                    let consumer = format!("sweep-{n}@example.com");
                    cases.push(run_case(&client, tool, surface, plan, consumer));
                }
            }
        }
    }
    faulty.set_plan(None);

    let on_disk = safekeeper_service::verify_dir(dir, None).expect("store readable");
    let records = safekeeper_service::store::read_records(dir).expect("store readable").records;
    let durable: HashMap<u64, (Digest, String)> = records
        .iter()
        .map(|r| (r.sequence, (r.entry_hash, r.entry().responsible.clone())))
        .collect();

    let mut violations = Vec::new();
    if !on_disk.report.ok {
        violations.push(format!("store fails verification after sweep: {:?}", on_disk.report.failures));
    }
    for c in &cases {
        let label = format!("{:?} {:?}", c.surface, c.plan);
        if c.released {
            if let Surface::Gate(_) = c.surface {
                if !durable.values().any(|(_, who)| *who == c.consumer) {
                    violations.push(format!("{label}: gate opened with nothing on disk"));
                }
            } else if c.receipts.len() as u32 != clean_calls(c.surface) {
                violations.push(format!("{label}: released with {} receipts", c.receipts.len()));
            }
            for r in &c.receipts {
                match durable.get(&r.sequence) {
                    Some((hash, who)) if *hash == r.entry_hash && *who == c.consumer => {}
                    _ => violations.push(format!("{label}: receipt {} not on disk", r.sequence)),
                }
            }
            if c.gate_state == Some(GateState::Hidden) {
                violations.push(format!("{label}: result released but gate hidden"));
            }
        } else {
            if c.gate_state == Some(GateState::Activated) {
                violations.push(format!("{label}: gate activated without a result"));
            }
            let logs_first = matches!(
                c.surface,
                Surface::Guard(LoggingMode::OnRequest | LoggingMode::OncePerReport)
                    | Surface::Gate(LoggingMode::OnRequest)
                    | Surface::Report
            );
            if logs_first && c.analysis_runs > 0 {
                violations.push(format!("{label}: analysis ran without a receipt"));
            }
        }
    }
    let released = cases.iter().filter(|c| c.released).count();
    SweepReport {
        cases,
        released,
        violations,
    }
}

fn run_case(client: &MonitorClient, tool: &str, surface: Surface, plan: FaultPlan, consumer: String) -> CaseOutcome {
    let runs = AtomicU32::new(0);
    let analysis = || {
        runs.fetch_add(1, Ordering::SeqCst);
        cols()
    };
    let mut gate_state = None;
    let (released, receipts) = match surface {
        Surface::Guard(mode) => {
            let cache = ReportCache::in_memory();
            match guarded_run(client, &consumer, &descriptor(tool, "a"), mode, Some(&cache), analysis) {
                Ok(g) => (true, g.receipt.into_iter().collect()),
                Err(_) => (false, Vec::new()),
            }
        }
        Surface::Gate(mode) => {
            let gate = AnalysisGate::new(descriptor(tool, "a"), mode);
            let out = gate.activate(client, &consumer, analysis);
            gate_state = Some(gate.state());
            match out {
                // The gate keeps its receipt to itself; the check looks up
                // the consumer's records instead.
                Ok(_) => (true, Vec::new()),
                Err(_) => (false, Vec::new()),
            }
        }
        Surface::Report => {
            let cache = ReportCache::in_memory();
            let selection = ["a", "b", "c"]
                .iter()
                .map(|name| Selected::new(*name, descriptor(tool, name), &analysis))
                .collect();
            match select_and_report(client, &consumer, selection, &cache) {
                Ok(report) => (true, report.receipts),
                Err(_) => (false, Vec::new()),
            }
        }
    };
    CaseOutcome {
        surface,
        plan,
        consumer,
        released,
        receipts,
        analysis_runs: runs.load(Ordering::SeqCst),
        gate_state,
    }
}
