use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::events::{CommitEvent, EventFixture, MessageEvent, ReviewEvent};
use crate::time::{Timestamp, SECONDS_PER_DAY};

/// 2021-10-01T00:00:00Z; generated events fall in the days after it.
pub const FIXTURE_EPOCH: Timestamp = Timestamp::from_unix(1_633_046_400);

const REPOSITORIES: &[&str] = &["backend", "frontend", "infrastructure", "docs"];
const CHANNELS: &[&str] = &["#general", "#dev", "#releases", "#random"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSize {
    pub owners: usize,
    pub consumers: usize,
    pub commits: usize,
    pub reviews: usize,
    pub messages: usize,
    /// Events are spread over this many days after [`FIXTURE_EPOCH`].
    pub days: u32,
}

impl Default for FixtureSize {
    fn default() -> Self {
        FixtureSize {
            owners: 8,
            consumers: 3,
            commits: 400,
            reviews: 120,
            messages: 300,
            days: 28,
        }
    }
}

/// Deterministic synthetic fixture for `seed`. Requires at least one owner
/// whenever any events are requested.
pub fn generate_fixture(seed: u64, size: FixtureSize) -> EventFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let owners: Vec<String> = (1..=size.owners)
        .map(|i| format!("dev{i:02}@example.com"))
        .collect();
    let consumers: Vec<String> = (1..=size.consumers)
        .map(|i| format!("lead{i:02}@example.com"))
        .collect();
    let days = size.days.max(1) as i64;

    let time = |rng: &mut ChaCha8Rng| {
        let day = rng.gen_range(0..days);
        // Mostly working hours, with some late-night activity.
        let hour = if rng.gen_bool(0.85) {
            rng.gen_range(8..19)
        } else {
            rng.gen_range(0..24)
        };
        let second = rng.gen_range(0..3600);
        FIXTURE_EPOCH.plus_secs(day * SECONDS_PER_DAY + hour * 3600 + second)
    };
    let pick = |rng: &mut ChaCha8Rng, from: &[String]| from.choose(rng).cloned().expect("owners must not be empty");

    let commits = (0..size.commits)
        .map(|_| CommitEvent {
            author: pick(&mut rng, &owners),
            time: time(&mut rng),
            repository: REPOSITORIES[rng.gen_range(0..REPOSITORIES.len())].to_owned(),
        })
        .collect();

    let reviews = (0..size.reviews)
        .map(|i| {
            let reviewer = pick(&mut rng, &owners);
            let mut reviewee = pick(&mut rng, &owners);
            if owners.len() > 1 {
                while reviewee == reviewer {
                    reviewee = pick(&mut rng, &owners);
                }
            }
            ReviewEvent {
                reviewer,
                reviewee,
                item: format!("PR-{}", 100 + i),
                time: time(&mut rng),
            }
        })
        .collect();

    let messages = (0..size.messages)
        .map(|_| {
            let sender = pick(&mut rng, &owners);
            let mention_count = rng.gen_range(0..=3);
            let mentions = (0..mention_count).map(|_| pick(&mut rng, &owners)).collect();
            MessageEvent {
                sender,
                mentions,
                channel: CHANNELS[rng.gen_range(0..CHANNELS.len())].to_owned(),
                time: time(&mut rng),
            }
        })
        .collect();

    EventFixture {
        owners,
        consumers,
        commits,
        reviews,
        messages,
    }
}
