use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitEvent {
    pub author: String,
    pub time: Timestamp,
    pub repository: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewEvent {
    pub reviewer: String,
    pub reviewee: String,
    pub item: String,
    pub time: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageEvent {
    pub sender: String,
    #[serde(default)]
    pub mentions: Vec<String>,
    pub channel: String,
    pub time: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersonRole {
    Owner,
    Consumer,
}

/// One line of a fixture file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum FixtureLine {
    Person { id: String, role: PersonRole },
    Commit(CommitEvent),
    Review(ReviewEvent),
    Message(MessageEvent),
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("id `{0}` is empty or not in the roster")]
    UnknownId(String),
}

/// Synthetic stand-in for Git, issue-tracker and chat data sources.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventFixture {
    /// Data owners (developers the events are about).
    pub owners: Vec<String>,
    /// Data consumers (team leads running analyses).
    pub consumers: Vec<String>,
    pub commits: Vec<CommitEvent>,
    pub reviews: Vec<ReviewEvent>,
    pub messages: Vec<MessageEvent>,
}

impl EventFixture {
    pub fn validate(&self) -> Result<(), FixtureError> {
        let roster: BTreeSet<&str> = self
            .owners
            .iter()
            .chain(&self.consumers)
            .map(String::as_str)
            .collect();
        let check = |id: &String| {
            if roster.contains(id.as_str()) {
                Ok(())
            } else {
                Err(FixtureError::UnknownId(id.clone()))
            }
        };
        for c in &self.commits {
            check(&c.author)?;
        }
        for r in &self.reviews {
            check(&r.reviewer)?;
            check(&r.reviewee)?;
        }
        for m in &self.messages {
            check(&m.sender)?;
            m.mentions.iter().try_for_each(check)?;
        }
        Ok(())
    }

    /// Writes the fixture as JSON lines: people first, then commits,
    /// reviews and messages, each in stored order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut line = |l: FixtureLine| -> io::Result<()> {
            serde_json::to_writer(&mut out, &l)?;
            out.write_all(b"\n")
        };
        for id in &self.owners {
            line(FixtureLine::Person {
                id: id.clone(),
                role: PersonRole::Owner,
            })?;
        }
        for id in &self.consumers {
            line(FixtureLine::Person {
                id: id.clone(),
                role: PersonRole::Consumer,
            })?;
        }
        self.commits.iter().try_for_each(|c| line(FixtureLine::Commit(c.clone())))?;
        self.reviews.iter().try_for_each(|r| line(FixtureLine::Review(r.clone())))?;
        self.messages.iter().try_for_each(|m| line(FixtureLine::Message(m.clone())))?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, FixtureError> {
        let mut fixture = EventFixture::default();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: FixtureLine = serde_json::from_str(&line)
                .map_err(|source| FixtureError::Parse { line: idx + 1, source })?;
            match parsed {
                FixtureLine::Person { id, role: PersonRole::Owner } => fixture.owners.push(id),
                FixtureLine::Person { id, role: PersonRole::Consumer } => fixture.consumers.push(id),
                FixtureLine::Commit(c) => fixture.commits.push(c),
                FixtureLine::Review(r) => fixture.reviews.push(r),
                FixtureLine::Message(m) => fixture.messages.push(m),
            }
        }
        fixture.validate()?;
        Ok(fixture)
    }
}
