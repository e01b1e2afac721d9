mod common;

use std::time::Instant;

use common::sweep::{run_sweep, SURFACES};
use common::Live;
use monitor_sdk::{FaultKind, LoggingMode};

#[test]
fn no_result_is_released_without_a_durable_receipt() {
    let live = Live::start();
    let key = live.register("sweep-tool");
    let started = Instant::now();
    let report = run_sweep(&live.url, key, "sweep-tool", live.dir.path());
    assert!(report.violations.is_empty(), "{:#?}", report.violations);
    assert!(started.elapsed().as_secs() < 30);
    // 6 surfaces, 5 kinds, 3 or 9 points, transient and persistent.
    assert_eq!(report.cases.len(), 5 * 2 * (5 * 3 + 9));
    assert_eq!(SURFACES.len(), 6);

    // A rejection is final; a persistent fault on the first call exhausts
    // every retry. Either way nothing is released.
    for c in &report.cases {
        if c.plan.at_call == 1 && (c.plan.kind == FaultKind::Rejected || c.plan.persistent) {
            assert!(!c.released, "{c:?}");
        }
    }
    let single_transient = report.cases.iter().find(|c| {
        c.plan.kind == FaultKind::Timeout && c.plan.at_call == 1 && !c.plan.persistent
    });
    assert!(single_transient.unwrap().released);
    assert!(report.released > 0 && report.released < report.cases.len());
}

#[test]
fn on_result_failure_discards_the_computed_result() {
    let live = Live::start();
    let (client, faulty) = live.faulty_client("jira");
    faulty.set_plan(Some(monitor_sdk::FaultPlan {
        kind: FaultKind::Unreachable,
        at_call: 1,
        persistent: true,
    }));
    let mut ran = false;
    let out = monitor_sdk::guarded_run(
        &client,
        "c",
        &common::descriptor("jira", &["user_name"]),
        LoggingMode::OnResult,
        None,
        || {
            ran = true;
            common::sweep::cols()
        },
    );
    assert!(ran);
    assert!(out.is_err());
    assert_eq!(faulty.calls(), 3);
    assert_eq!(faulty.delivered(), 0);
    assert_eq!(live.count(), 0);
}

#[test]
fn lost_response_is_retried_with_a_fresh_nonce() {
    let live = Live::start();
    let (client, faulty) = live.faulty_client("jira");
    faulty.set_plan(Some(monitor_sdk::FaultPlan {
        kind: FaultKind::ResponseLost,
        at_call: 1,
        persistent: false,
    }));
    let receipt = client
        .log_usage(&common::descriptor("jira", &["user_name"]), "c")
        .unwrap();
    // The first attempt was stored too; the retry is not a replay.
    assert_eq!(live.count(), 2);
    assert_eq!(receipt.sequence, 1);
}
