use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::events::{CommitEvent, MessageEvent, ReviewEvent};

/// Commits per UTC hour of day, per author.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommitHours {
    pub per_author: BTreeMap<String, [u32; 24]>,
}

pub fn commit_hours(commits: &[CommitEvent]) -> CommitHours {
    let mut per_author: BTreeMap<String, [u32; 24]> = BTreeMap::new();
    for commit in commits {
        let bins = per_author.entry(commit.author.clone()).or_insert([0; 24]);
        bins[commit.time.hour_of_day() as usize] += 1;
    }
    CommitHours { per_author }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewerScore {
    pub reviewer: String,
    pub reviews: u32,
}

/// Team members ranked by reviews performed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupporterRanking {
    pub ranking: Vec<ReviewerScore>,
}

pub fn supporter_ranking(reviews: &[ReviewEvent]) -> SupporterRanking {
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    for review in reviews {
        *counts.entry(review.reviewer.as_str()).or_default() += 1;
    }
    let mut ranking: Vec<ReviewerScore> = counts
        .into_iter()
        .map(|(reviewer, reviews)| ReviewerScore {
            reviewer: reviewer.to_owned(),
            reviews,
        })
        .collect();
    // BTreeMap order is id ascending; a stable sort keeps it for ties.
    ranking.sort_by_key(|s| std::cmp::Reverse(s.reviews));
    SupporterRanking { ranking }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionEdge {
    pub from: String,
    pub to: String,
    pub weight: u32,
}

/// Directed "who mentions whom" graph; edges sorted by (from, to).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MentionNetwork {
    pub edges: Vec<MentionEdge>,
}

impl MentionNetwork {
    pub fn weight(&self, from: &str, to: &str) -> u32 {
        self.edges
            .iter()
            .find(|e| e.from == from && e.to == to)
            .map_or(0, |e| e.weight)
    }
}

pub fn mention_network(messages: &[MessageEvent]) -> MentionNetwork {
    let mut weights: BTreeMap<(&str, &str), u32> = BTreeMap::new();
    for message in messages {
        for mentioned in &message.mentions {
            *weights
                .entry((message.sender.as_str(), mentioned.as_str()))
                .or_default() += 1;
        }
    }
    MentionNetwork {
        edges: weights
            .into_iter()
            .map(|((from, to), weight)| MentionEdge {
                from: from.to_owned(),
                to: to.to_owned(),
                weight,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Timestamp;

    fn at(h: i64, m: i64) -> Timestamp {
        Timestamp::from_unix(1_633_046_400 + h * 3600 + m * 60)
    }

    fn commit(author: &str, time: Timestamp) -> CommitEvent {
        CommitEvent {
            author: author.into(),
            time,
            repository: "core".into(),
        }
    }

    fn review(reviewer: &str, item: &str) -> ReviewEvent {
        ReviewEvent {
            reviewer: reviewer.into(),
            reviewee: "x".into(),
            item: item.into(),
            time: Timestamp::from_unix(0),
        }
    }

    fn message(sender: &str, mentions: &[&str]) -> MessageEvent {
        MessageEvent {
            sender: sender.into(),
            mentions: mentions.iter().map(|s| s.to_string()).collect(),
            channel: "#dev".into(),
            time: Timestamp::from_unix(0),
        }
    }

    #[test]
    fn commit_hours_empty() {
        assert!(commit_hours(&[]).per_author.is_empty());
    }

    #[test]
    fn commit_hours_direct_binning() {
        let hours = commit_hours(&[commit("A", at(9, 5)), commit("A", at(9, 55)), commit("A", at(14, 0))]);
        let mut expected = [0u32; 24];
        expected[9] = 2;
        expected[14] = 1;
        assert_eq!(hours.per_author["A"], expected);
    }

    #[test]
    fn supporter_ranking_basic() {
        assert!(supporter_ranking(&[]).ranking.is_empty());
        let r = supporter_ranking(&[review("B", "1"), review("A", "2"), review("A", "3"), review("A", "4")]);
        assert_eq!(
            r.ranking,
            vec![
                ReviewerScore { reviewer: "A".into(), reviews: 3 },
                ReviewerScore { reviewer: "B".into(), reviews: 1 },
            ]
        );
    }

    #[test]
    fn supporter_ties_by_id() {
        let r = supporter_ranking(&[review("b", "1"), review("a", "2")]);
        assert_eq!(r.ranking[0].reviewer, "a");
    }

    #[test]
    fn mention_network_basic() {
        assert!(mention_network(&[message("A", &[])]).edges.is_empty());
        let g = mention_network(&[message("A", &["B"]), message("B", &["A"]), message("A", &["B"])]);
        assert_eq!(
            g.edges,
            vec![
                MentionEdge { from: "A".into(), to: "B".into(), weight: 2 },
                MentionEdge { from: "B".into(), to: "A".into(), weight: 1 },
            ]
        );
    }

    #[test]
    fn self_mentions_are_loops() {
        let g = mention_network(&[message("A", &["A", "A"])]);
        assert_eq!(g.weight("A", "A"), 2);
    }
}
