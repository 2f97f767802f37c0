use std::path::Path;

use serde::{Deserialize, Serialize};

use super::command::ControlCommand;
use super::config::SystemConfigError;

/// A command to apply just before cycle `cycle` runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub cycle: u64,
    pub command: ControlCommand,
}

/// Scripted operator input for a headless run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub commands: Vec<ScenarioEntry>,
}

impl Scenario {
    /// Entries are kept in cycle order; entries for the same cycle keep
    /// their file order.
    pub fn new(mut commands: Vec<ScenarioEntry>) -> Self {
        commands.sort_by_key(|e| e.cycle);
        Scenario { commands }
    }

    pub fn from_json(text: &str) -> Result<Self, SystemConfigError> {
        let raw: Scenario = serde_json::from_str(text)?;
        Ok(Scenario::new(raw.commands))
    }

    pub fn load(path: &Path) -> Result<Self, SystemConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| SystemConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn last_cycle(&self) -> Option<u64> {
        self.commands.last().map(|e| e.cycle)
    }
}
