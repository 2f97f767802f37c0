use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::resource::ResourceKind;
use crate::component::CommandKind;
use crate::plant::SiloId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Recipe {
    A,
    B,
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Recipe::A => "A",
            Recipe::B => "B",
        })
    }
}

impl FromStr for Recipe {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Recipe::A),
            "B" | "b" => Ok(Recipe::B),
            other => Err(format!("unknown recipe `{other}`")),
        }
    }
}

impl Recipe {
    /// Liqueur A: raw liquid dwells in S1, is poured into S4, heated, mixed.
    /// Liqueur B: raw liquid is heated in S2, transferred to S3, mixed.
    pub fn stages(self) -> Vec<Stage> {
        match self {
            Recipe::A => vec![
                Stage::Fill(SiloId::S1),
                Stage::Dwell(SiloId::S1),
                Stage::Transfer {
                    from: SiloId::S1,
                    to: SiloId::S4,
                },
                Stage::Heat(SiloId::S4),
                Stage::Mix(SiloId::S4),
                Stage::Empty(SiloId::S4),
            ],
            Recipe::B => vec![
                Stage::Fill(SiloId::S2),
                Stage::Heat(SiloId::S2),
                Stage::Transfer {
                    from: SiloId::S2,
                    to: SiloId::S3,
                },
                Stage::Mix(SiloId::S3),
                Stage::Empty(SiloId::S3),
            ],
        }
    }

    pub fn silos(self) -> [SiloId; 2] {
        match self {
            Recipe::A => [SiloId::S1, SiloId::S4],
            Recipe::B => [SiloId::S2, SiloId::S3],
        }
    }
}

/// One step of a recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Fill(SiloId),
    /// Timed stand-in for the unspecified basic treatment in S1.
    Dwell(SiloId),
    Heat(SiloId),
    Transfer { from: SiloId, to: SiloId },
    Mix(SiloId),
    Empty(SiloId),
}

impl Stage {
    /// Every stage that moves liquid through the shared pipe needs PIPE;
    /// mixing needs POWER.
    pub fn resource(&self) -> Option<ResourceKind> {
        match self {
            Stage::Fill(_) | Stage::Transfer { .. } | Stage::Empty(_) => Some(ResourceKind::Pipe),
            Stage::Mix(_) => Some(ResourceKind::Power),
            Stage::Dwell(_) | Stage::Heat(_) => None,
        }
    }

    pub fn state_name(&self) -> String {
        match self {
            Stage::Fill(s) => format!("FILLING_{s}"),
            Stage::Dwell(s) => format!("DWELLING_{s}"),
            Stage::Heat(s) => format!("HEATING_{s}"),
            Stage::Transfer { .. } => "TRANSFERRING".to_string(),
            Stage::Mix(s) => format!("MIXING_{s}"),
            Stage::Empty(s) => format!("EMPTYING_{s}"),
        }
    }

    /// Commands issued on entering the stage, destination first for transfers.
    pub fn commands(&self, config: &RecipeConfig) -> Vec<(SiloId, CommandKind)> {
        match *self {
            Stage::Fill(s) => vec![(s, CommandKind::Fill)],
            Stage::Dwell(_) => vec![],
            Stage::Heat(s) => vec![(
                s,
                CommandKind::HeatToTemp {
                    setpoint: config.setpoint,
                },
            )],
            Stage::Transfer { from, to } => vec![(to, CommandKind::Fill), (from, CommandKind::Empty)],
            Stage::Mix(s) => vec![(
                s,
                CommandKind::Mix {
                    duration: config.mix_duration,
                },
            )],
            Stage::Empty(s) => vec![(s, CommandKind::Empty)],
        }
    }
}

/// Parameters of one batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeConfig {
    /// Degrees C.
    pub setpoint: f64,
    /// Seconds.
    pub mix_duration: f64,
    /// Seconds of dwell in S1 (recipe A only).
    #[serde(default)]
    pub dwell_s1: f64,
    /// Start the next batch instead of finishing.
    #[serde(default)]
    pub repeat: bool,
}

impl RecipeConfig {
    pub fn default_for(recipe: Recipe) -> Self {
        match recipe {
            Recipe::A => RecipeConfig {
                setpoint: 60.0,
                mix_duration: 30.0,
                dwell_s1: 10.0,
                repeat: false,
            },
            Recipe::B => RecipeConfig {
                setpoint: 70.0,
                mix_duration: 30.0,
                dwell_s1: 0.0,
                repeat: false,
            },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.setpoint.is_finite() {
            return Err("setpoint must be finite".into());
        }
        if !(self.mix_duration.is_finite() && self.mix_duration >= 0.0) {
            return Err("mix_duration must be >= 0".into());
        }
        if !(self.dwell_s1.is_finite() && self.dwell_s1 >= 0.0) {
            return Err("dwell_s1 must be >= 0".into());
        }
        Ok(())
    }

    pub fn with_overrides(mut self, overrides: &RecipeOverrides) -> Self {
        if let Some(v) = overrides.setpoint {
            self.setpoint = v;
        }
        if let Some(v) = overrides.mix_duration {
            self.mix_duration = v;
        }
        if let Some(v) = overrides.dwell_s1 {
            self.dwell_s1 = v;
        }
        if let Some(v) = overrides.repeat {
            self.repeat = v;
        }
        self
    }
}

/// Partial recipe parameters supplied with a start request.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setpoint: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix_duration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell_s1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat: Option<bool>,
}

/// Default parameters per recipe (the `recipes` config section).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecipeDefaults {
    #[serde(rename = "A", default = "default_a")]
    pub a: RecipeConfig,
    #[serde(rename = "B", default = "default_b")]
    pub b: RecipeConfig,
}

fn default_a() -> RecipeConfig {
    RecipeConfig::default_for(Recipe::A)
}

fn default_b() -> RecipeConfig {
    RecipeConfig::default_for(Recipe::B)
}

impl Default for RecipeDefaults {
    fn default() -> Self {
        RecipeDefaults {
            a: default_a(),
            b: default_b(),
        }
    }
}

impl RecipeDefaults {
    pub fn get(&self, recipe: Recipe) -> RecipeConfig {
        match recipe {
            Recipe::A => self.a,
            Recipe::B => self.b,
        }
    }
}
