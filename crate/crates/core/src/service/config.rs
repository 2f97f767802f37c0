use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plant::{ConfigError, PlantConfig};
use crate::process::{Recipe, RecipeDefaults};
use crate::scan::{CycleConfig, RuntimeError};

/// Run-log destination and rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Rotate once the active file reaches this many bytes.
    #[serde(default = "default_max_bytes")]
    pub max_bytes: u64,
    /// Rotated files kept besides the active one.
    #[serde(default = "default_max_files")]
    pub max_files: usize,
}

fn default_max_bytes() -> u64 {
    16 * 1024 * 1024
}

fn default_max_files() -> usize {
    4
}

impl Default for LogConfig {
    fn default() -> Self {
        LogConfig {
            path: None,
            max_bytes: default_max_bytes(),
            max_files: default_max_files(),
        }
    }
}

/// Everything needed to assemble a plant, as read from a JSON file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default)]
    pub plant: PlantConfig,
    #[serde(default)]
    pub cycle: CycleConfig,
    #[serde(default)]
    pub recipes: RecipeDefaults,
    #[serde(default)]
    pub log: LogConfig,
}

#[derive(Debug, Error)]
pub enum SystemConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed configuration: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Plant(#[from] ConfigError),
    #[error(transparent)]
    Cycle(#[from] RuntimeError),
    #[error("recipe {recipe}: {message}")]
    Recipe { recipe: Recipe, message: String },
    #[error("log: {0}")]
    Log(String),
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self, SystemConfigError> {
        let config: SystemConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, SystemConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| SystemConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), SystemConfigError> {
        self.plant.validate()?;
        self.cycle.validate()?;
        self.plant.validate_step(self.cycle.dt())?;
        for recipe in [Recipe::A, Recipe::B] {
            self.recipes
                .get(recipe)
                .validate()
                .map_err(|message| SystemConfigError::Recipe { recipe, message })?;
        }
        if self.log.max_bytes == 0 {
            return Err(SystemConfigError::Log("max_bytes must be positive".into()));
        }
        Ok(())
    }
}
