use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::ChainedRecord;
use crate::entry::UsageLogEntry;
use crate::time::Timestamp;

pub const DEFAULT_PAGE_SIZE: u32 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("page_size must be at least 1")]
    ZeroPageSize,
    #[error("`from` must not be after `to`")]
    InvertedRange,
}

/// Conjunctive filter over usage entries. `text` is a case-insensitive
/// substring match against the justification and each data type; `from`
/// is inclusive and `to` exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryFilter {
    pub owner: Option<String>,
    pub responsible: Option<String>,
    pub tool: Option<String>,
    pub kind: Option<String>,
    pub text: Option<String>,
    pub from: Option<Timestamp>,
    pub to: Option<Timestamp>,
    pub page_size: u32,
    pub page_index: u32,
}

impl Default for QueryFilter {
    fn default() -> Self {
        QueryFilter {
            owner: None,
            responsible: None,
            tool: None,
            kind: None,
            text: None,
            from: None,
            to: None,
            page_size: DEFAULT_PAGE_SIZE,
            page_index: 0,
        }
    }
}

impl QueryFilter {
    pub fn validate(&self) -> Result<(), FilterError> {
        if self.page_size == 0 {
            return Err(FilterError::ZeroPageSize);
        }
        if let (Some(from), Some(to)) = (self.from, self.to) {
            if from > to {
                return Err(FilterError::InvertedRange);
            }
        }
        Ok(())
    }

    pub fn matches(&self, entry: &UsageLogEntry) -> bool {
        let eq = |want: &Option<String>, have: &str| want.as_deref().is_none_or(|w| w == have);
        if let Some(owner) = &self.owner {
            if !entry.is_owned_by(owner) {
                return false;
            }
        }
        if !eq(&self.responsible, &entry.responsible)
            || !eq(&self.tool, &entry.tool)
            || !eq(&self.kind, &entry.kind)
        {
            return false;
        }
        if self.from.is_some_and(|from| entry.timestamp < from) {
            return false;
        }
        if self.to.is_some_and(|to| entry.timestamp >= to) {
            return false;
        }
        match &self.text {
            Some(needle) => {
                let needle = needle.to_lowercase();
                entry.justification.to_lowercase().contains(&needle)
                    || entry
                        .data_types
                        .iter()
                        .any(|t| t.to_lowercase().contains(&needle))
            }
            None => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub items: Vec<ChainedRecord>,
    pub total: u64,
}

/// Matching records, newest first (timestamp descending, then sequence
/// descending), paginated.
pub fn query<'a, I>(records: I, filter: &QueryFilter) -> Result<Page, FilterError>
where
    I: IntoIterator<Item = &'a ChainedRecord>,
{
    filter.validate()?;
    let mut hits: Vec<&ChainedRecord> = records
        .into_iter()
        .filter(|r| filter.matches(r.entry()))
        .collect();
    hits.sort_unstable_by(|a, b| {
        b.entry()
            .timestamp
            .cmp(&a.entry().timestamp)
            .then(b.sequence.cmp(&a.sequence))
    });
    let total = hits.len() as u64;
    let start = (filter.page_index as usize).saturating_mul(filter.page_size as usize);
    let items = hits
        .into_iter()
        .skip(start)
        .take(filter.page_size as usize)
        .cloned()
        .collect();
    Ok(Page { items, total })
}
