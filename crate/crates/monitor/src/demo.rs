//! The three demo tools, each exposing one people analysis through a
//! different logging pattern:
//!
//! * `git-analyzer`: commit hours, in a report the consumer explicitly
//!   selects; logged once per report.
//! * `jira-supporter`: supporter ranking, hidden behind an activation gate;
//!   logs the data types present in the revealed result.
//! * `slack-network`: mention network, logged each time it is triggered.

use safekeeper_core::analytics::{
    commit_hours, mention_network, supporter_ranking, CommitHours, DemoPlan, EventFixture,
    MentionNetwork, SupporterRanking,
};
use serde::Serialize;

use crate::client::{MonitorClient, UsageDescriptor};
use crate::gate::AnalysisGate;
use crate::guard::{guarded_run, GuardError, LoggingMode};
use crate::report::{select_and_report, ReportCache, Selected};

pub const GIT_ANALYZER: &str = "git-analyzer";
pub const JIRA_SUPPORTER: &str = "jira-supporter";
pub const SLACK_NETWORK: &str = "slack-network";
pub const DEMO_TOOLS: [&str; 3] = [GIT_ANALYZER, JIRA_SUPPORTER, SLACK_NETWORK];

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

pub fn commit_hours_descriptor(owners: &[String]) -> UsageDescriptor {
    UsageDescriptor {
        tool: GIT_ANALYZER.into(),
        kind: "aggregation".into(),
        justification: "Commits per hour of the day for the team working-hours report".into(),
        data_types: strings(&["user_name", "commit_time"]),
        owners: owners.to_vec(),
    }
}

pub fn supporter_descriptor(owners: &[String]) -> UsageDescriptor {
    UsageDescriptor {
        tool: JIRA_SUPPORTER.into(),
        kind: "aggregation".into(),
        justification: "Rank team members by code reviews performed for others".into(),
        data_types: strings(&["user_name", "reviews_performed", "reviewee_name"]),
        owners: owners.to_vec(),
    }
}

pub fn network_descriptor(owners: &[String]) -> UsageDescriptor {
    UsageDescriptor {
        tool: SLACK_NETWORK.into(),
        kind: "access".into(),
        justification: "Show who mentions whom in team channels".into(),
        data_types: strings(&["user_name", "message_mentions"]),
        owners: owners.to_vec(),
    }
}

/// Opens the commit-hours report for `consumer`.
pub fn open_commit_hours_report(
    client: &MonitorClient,
    consumer: &str,
    fixture: &EventFixture,
    cache: &ReportCache,
) -> Result<(CommitHours, bool), GuardError> {
    let report = select_and_report(
        client,
        consumer,
        vec![Selected::new(
            "commit_hours",
            commit_hours_descriptor(&fixture.owners),
            || commit_hours(&fixture.commits),
        )],
        cache,
    )?;
    let generated = !report.from_cache;
    let (_, hours) = report.sections.into_iter().next().expect("one section");
    Ok((hours, generated))
}

pub fn supporter_gate(fixture: &EventFixture) -> AnalysisGate<SupporterRanking> {
    AnalysisGate::new(supporter_descriptor(&fixture.owners), LoggingMode::OnResult)
}

pub fn trigger_network(
    client: &MonitorClient,
    consumer: &str,
    fixture: &EventFixture,
) -> Result<MentionNetwork, GuardError> {
    guarded_run(
        client,
        consumer,
        &network_descriptor(&fixture.owners),
        LoggingMode::OnRequest,
        None,
        || mention_network(&fixture.messages),
    )
    .map(|g| g.result)
}

pub struct DemoClients {
    pub git: MonitorClient,
    pub jira: MonitorClient,
    pub slack: MonitorClient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionOutcome {
    pub consumer: String,
    pub report_opens: u32,
    /// Whether this run generated the report (as opposed to reopening it).
    pub report_generated: bool,
    pub supporter_revealed: bool,
    pub network_triggers: u32,
    /// Entries this session logged.
    pub entries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoOutcome {
    pub sessions: Vec<SessionOutcome>,
    pub entries_logged: u64,
    pub commit_hours: Option<CommitHours>,
    pub supporter_ranking: Option<SupporterRanking>,
    pub mention_network: Option<MentionNetwork>,
}

/// Plays every consumer session of `plan`. Any logging failure aborts the
/// whole run and nothing is returned but the error.
pub fn run_demo(
    plan: &DemoPlan,
    fixture: &EventFixture,
    clients: &DemoClients,
    cache: &ReportCache,
) -> Result<DemoOutcome, GuardError> {
    let mut outcome = DemoOutcome {
        sessions: Vec::new(),
        entries_logged: 0,
        commit_hours: None,
        supporter_ranking: None,
        mention_network: None,
    };
    for session in &plan.sessions {
        let consumer = session.consumer.as_str();
        let mut entries = 0;
        let mut report_generated = false;
        for _ in 0..session.report_opens {
            let (hours, generated) = open_commit_hours_report(&clients.git, consumer, fixture, cache)?;
            if generated {
                report_generated = true;
                entries += 1;
            }
            outcome.commit_hours = Some(hours);
        }

        // Each consumer gets their own dashboard; the gadget starts hidden.
        let gate = supporter_gate(fixture);
        if session.activate_supporter {
            let ranking = gate.activate(&clients.jira, consumer, || supporter_ranking(&fixture.reviews))?;
            entries += 1;
            outcome.supporter_ranking = Some(ranking);
        }

        for _ in 0..session.network_triggers {
            outcome.mention_network = Some(trigger_network(&clients.slack, consumer, fixture)?);
            entries += 1;
        }

        outcome.entries_logged += entries;
        outcome.sessions.push(SessionOutcome {
            consumer: consumer.to_owned(),
            report_opens: session.report_opens,
            report_generated,
            supporter_revealed: session.activate_supporter,
            network_triggers: session.network_triggers,
            entries,
        });
    }
    Ok(outcome)
}
