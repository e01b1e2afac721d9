use serde::{Deserialize, Serialize};

use crate::error::InvalidField;
use crate::time::Timestamp;

/// One recorded data usage: who used which owners' data, with what tool,
/// for what purpose, and when.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageLogEntry {
    pub entry_id: String,
    /// The data consumer responsible for the usage.
    pub responsible: String,
    pub tool: String,
    /// Usage-kind label such as `access` or `aggregation`.
    pub kind: String,
    pub justification: String,
    pub data_types: Vec<String>,
    pub owners: Vec<String>,
    pub timestamp: Timestamp,
}

impl UsageLogEntry {
    pub fn validate(&self) -> Result<(), InvalidField> {
        require_non_empty("entry_id", &self.entry_id)?;
        require_non_empty("responsible", &self.responsible)?;
        require_non_empty("tool", &self.tool)?;
        require_non_empty("kind", &self.kind)?;
        require_non_empty_list("data_types", &self.data_types)?;
        require_non_empty_list("owners", &self.owners)?;
        Ok(())
    }

    pub fn is_owned_by(&self, owner: &str) -> bool {
        self.owners.iter().any(|o| o == owner)
    }
}

pub(crate) fn require_non_empty(field: &'static str, value: &str) -> Result<(), InvalidField> {
    if value.is_empty() {
        Err(InvalidField::Empty(field))
    } else {
        Ok(())
    }
}

pub(crate) fn require_non_empty_list(
    field: &'static str,
    values: &[String],
) -> Result<(), InvalidField> {
    if values.is_empty() {
        return Err(InvalidField::EmptyList(field));
    }
    if values.iter().any(String::is_empty) {
        return Err(InvalidField::EmptyListItem(field));
    }
    Ok(())
}
