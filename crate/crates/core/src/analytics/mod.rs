//! Deterministic people-analytics over developer activity events.

mod analyses;
mod events;
mod fixture;
mod plan;

pub use analyses::{
    commit_hours, mention_network, supporter_ranking, CommitHours, MentionEdge, MentionNetwork,
    ReviewerScore, SupporterRanking,
};
pub use events::{CommitEvent, EventFixture, FixtureError, MessageEvent, PersonRole, ReviewEvent};
pub use fixture::{generate_fixture, FixtureSize, FIXTURE_EPOCH};
pub use plan::{demo_plan, ConsumerSession, DemoPlan};
