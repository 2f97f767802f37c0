use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plant::SiloId;

/// Controller-level operation offered by a silo CPC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommandKind {
    Fill,
    Empty,
    HeatToTemp { setpoint: f64 },
    /// Duration in seconds.
    Mix { duration: f64 },
    Cancel,
}

impl CommandKind {
    /// Operation name on the silo interface.
    pub fn operation(&self) -> &'static str {
        match self {
            CommandKind::Fill => "fill",
            CommandKind::Empty => "empty",
            CommandKind::HeatToTemp { .. } => "heatToTemp",
            CommandKind::Mix { .. } => "mix",
            CommandKind::Cancel => "cancel",
        }
    }

    /// The callback that reports completion, `None` for CANCEL.
    pub fn completion(&self) -> Option<CallbackKind> {
        match self {
            CommandKind::Fill => Some(CallbackKind::FillingCompleted),
            CommandKind::Empty => Some(CallbackKind::PouringCompleted),
            CommandKind::HeatToTemp { .. } => Some(CallbackKind::HeatingCompleted),
            CommandKind::Mix { .. } => Some(CallbackKind::MixingCompleted),
            CommandKind::Cancel => None,
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandKind::Fill => f.write_str("FILL"),
            CommandKind::Empty => f.write_str("EMPTY"),
            CommandKind::HeatToTemp { setpoint } => write!(f, "HEAT_TO_TEMP({setpoint})"),
            CommandKind::Mix { duration } => write!(f, "MIX({duration})"),
            CommandKind::Cancel => f.write_str("CANCEL"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Command {
    pub kind: CommandKind,
    pub issue_cycle: u64,
}

impl Command {
    pub fn new(kind: CommandKind, issue_cycle: u64) -> Self {
        Command { kind, issue_cycle }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CallbackKind {
    FillingCompleted,
    PouringCompleted,
    HeatingCompleted,
    MixingCompleted,
}

impl CallbackKind {
    pub fn operation(self) -> &'static str {
        match self {
            CallbackKind::FillingCompleted => "fillingCompleted",
            CallbackKind::PouringCompleted => "pouringCompleted",
            CallbackKind::HeatingCompleted => "heatingCompleted",
            CallbackKind::MixingCompleted => "mixingCompleted",
        }
    }
}

/// Completion notification sent from a silo controller to its process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Callback {
    pub kind: CallbackKind,
    pub silo: SiloId,
    pub cycle: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CommandRejection {
    #[error("controller is busy with another command")]
    Busy,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("port is not connected")]
    NotConnected,
}
