use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

pub const SECONDS_PER_DAY: i64 = 86_400;

/// A UTC instant with second precision, stored as integer UNIX seconds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_unix(secs: i64) -> Self {
        Timestamp(secs)
    }

    pub const fn as_unix(self) -> i64 {
        self.0
    }

    pub fn now() -> Self {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0);
        Timestamp(secs)
    }

    /// Midnight UTC of the calendar day containing this instant.
    pub fn day_start(self) -> Self {
        Timestamp(self.0.div_euclid(SECONDS_PER_DAY) * SECONDS_PER_DAY)
    }

    /// Days since the epoch (UTC calendar days).
    pub fn day_number(self) -> i64 {
        self.0.div_euclid(SECONDS_PER_DAY)
    }

    /// UTC hour of day, 0..24.
    pub fn hour_of_day(self) -> u32 {
        (self.0.rem_euclid(SECONDS_PER_DAY) / 3600) as u32
    }

    pub fn plus_secs(self, secs: i64) -> Self {
        Timestamp(self.0.saturating_add(secs))
    }

    pub fn abs_diff_secs(self, other: Timestamp) -> u64 {
        self.0.abs_diff(other.0)
    }
}

impl fmt::Debug for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Timestamp({})", self.0)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Timestamp {
    fn from(secs: i64) -> Self {
        Timestamp(secs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_start_and_hour() {
        // 2021-10-28T23:27:05Z
        let t = Timestamp::from_unix(1_635_463_625);
        assert_eq!(t.day_start().as_unix(), 1_635_379_200);
        assert_eq!(t.hour_of_day(), 23);
    }

    #[test]
    fn negative_instants_floor_to_previous_day() {
        let t = Timestamp::from_unix(-1);
        assert_eq!(t.day_start().as_unix(), -SECONDS_PER_DAY);
        assert_eq!(t.hour_of_day(), 23);
    }
}
