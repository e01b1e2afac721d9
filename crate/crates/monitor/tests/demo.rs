mod common;

use std::sync::Arc;

use common::Live;
use monitor_sdk::demo::{run_demo, DemoClients, GIT_ANALYZER, JIRA_SUPPORTER, SLACK_NETWORK};
use monitor_sdk::{FaultKind, FaultPlan, FaultyTransport, HttpTransport, MonitorClient, ReportCache, RetryPolicy};
use safekeeper_core::analytics::{demo_plan, generate_fixture, DemoPlan, FixtureSize};

/// Entries each tool should log for `plan`, derived from the mode rules
/// alone: one per report generated, one per revealed gadget, one per trigger.
fn expected_per_tool(plan: &DemoPlan, reports_cached: bool) -> [u64; 3] {
    let mut counts = [0; 3];
    for s in &plan.sessions {
        if s.report_opens > 0 && !reports_cached {
            counts[0] += 1;
        }
        counts[1] += u64::from(s.activate_supporter);
        counts[2] += u64::from(s.network_triggers);
    }
    counts
}

fn logged_per_tool(live: &Live) -> [u64; 3] {
    let records = live.app.records();
    [GIT_ANALYZER, JIRA_SUPPORTER, SLACK_NETWORK]
        .map(|tool| records.iter().filter(|r| r.envelope.tool_id() == tool).count() as u64)
}

fn clients(live: &Live) -> DemoClients {
    DemoClients {
        git: live.client(GIT_ANALYZER),
        jira: live.client(JIRA_SUPPORTER),
        slack: live.client(SLACK_NETWORK),
    }
}

#[test]
fn demo_logs_exactly_what_the_modes_predict() {
    let live = Live::start();
    let fixture = generate_fixture(42, FixtureSize::default());
    let plan = demo_plan(42, &fixture);
    let clients = clients(&live);
    let cache = ReportCache::in_memory();

    let first = run_demo(&plan, &fixture, &clients, &cache).unwrap();
    let expected = expected_per_tool(&plan, false);
    assert_eq!(logged_per_tool(&live), expected);
    assert_eq!(first.entries_logged, expected.iter().sum::<u64>());
    assert!(first.commit_hours.is_some());

    // Same consumers, same cache: reports are reopened, not regenerated.
    let second = run_demo(&plan, &fixture, &clients, &cache).unwrap();
    let after = logged_per_tool(&live);
    assert_eq!(after[0], expected[0]);
    assert_eq!(after[1] - expected[1], expected_per_tool(&plan, true)[1]);
    assert_eq!(after[2] - expected[2], expected[2]);
    assert!(second.sessions.iter().all(|s| !s.report_generated));
    assert_eq!(second.commit_hours, first.commit_hours);
}

#[test]
fn demo_entries_are_attributed_to_each_consumer() {
    let live = Live::start();
    let fixture = generate_fixture(7, FixtureSize::default());
    let plan = demo_plan(7, &fixture);
    let outcome = run_demo(&plan, &fixture, &clients(&live), &ReportCache::in_memory()).unwrap();
    for s in &outcome.sessions {
        assert_eq!(live.records_for(&s.consumer).len() as u64, s.entries);
    }
    for r in live.app.records() {
        assert_eq!(r.entry().owners, fixture.owners);
    }
}

#[test]
fn demo_aborts_when_logging_fails_midway() {
    let live = Live::start();
    let fixture = generate_fixture(42, FixtureSize::default());
    let plan = demo_plan(42, &fixture);
    let faulty = Arc::new(FaultyTransport::new(Arc::new(HttpTransport::new(&live.url))));
    faulty.set_plan(Some(FaultPlan {
        kind: FaultKind::Unreachable,
        at_call: 2,
        persistent: true,
    }));
    let git_key = live.register(GIT_ANALYZER);
    let clients = DemoClients {
        git: MonitorClient::new(GIT_ANALYZER, git_key, faulty).with_retry(RetryPolicy::no_backoff()),
        jira: live.client(JIRA_SUPPORTER),
        slack: live.client(SLACK_NETWORK),
    };
    let cache = ReportCache::in_memory();
    assert!(run_demo(&plan, &fixture, &clients, &cache).is_err());
    // Only the first consumer's report got logged, and only it was cached.
    assert_eq!(cache.len(), 1);
    assert_eq!(logged_per_tool(&live)[0], 1);
}
