use std::fmt;

use serde::{Deserialize, Serialize};

use crate::plant::{Actuator, SiloId};
use crate::process::{AbortError, ProcessId, Recipe, RecipeOverrides, StartError};

/// Operator request, shared by the HTTP front end, scenario files and the
/// Python bindings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ControlCommand {
    StartProcess {
        recipe: Recipe,
        #[serde(default)]
        params: RecipeOverrides,
    },
    AbortProcess {
        process: ProcessId,
    },
    ManualActuator {
        silo: SiloId,
        actuator: Actuator,
        value: bool,
    },
    Pause,
    Resume,
    StepN {
        n: u64,
    },
}

impl ControlCommand {
    pub fn name(&self) -> &'static str {
        match self {
            ControlCommand::StartProcess { .. } => "START_PROCESS",
            ControlCommand::AbortProcess { .. } => "ABORT_PROCESS",
            ControlCommand::ManualActuator { .. } => "MANUAL_ACTUATOR",
            ControlCommand::Pause => "PAUSE",
            ControlCommand::Resume => "RESUME",
            ControlCommand::StepN { .. } => "STEP_N",
        }
    }
}

/// Acknowledgement of an accepted command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ack {
    /// First cycle in which the command has effect.
    pub effective_cycle: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    Validation,
    Conflict,
    SilosBusy,
    AlreadyDone,
    UnknownProcess,
    ServiceNotReady,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Validation => "VALIDATION",
            ErrorCode::Conflict => "CONFLICT",
            ErrorCode::SilosBusy => "SILOS_BUSY",
            ErrorCode::AlreadyDone => "ALREADY_DONE",
            ErrorCode::UnknownProcess => "UNKNOWN_PROCESS",
            ErrorCode::ServiceNotReady => "SERVICE_NOT_READY",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Refusal of a command, with a machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ControlError {
    pub code: ErrorCode,
    pub message: String,
}

impl ControlError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ControlError {
            code,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Validation, message)
    }
}

impl From<StartError> for ControlError {
    fn from(err: StartError) -> Self {
        let code = match err {
            StartError::SilosBusy(_) => ErrorCode::SilosBusy,
            StartError::Validation(_) => ErrorCode::Validation,
        };
        ControlError::new(code, err.to_string())
    }
}

impl From<AbortError> for ControlError {
    fn from(err: AbortError) -> Self {
        let code = match err {
            AbortError::UnknownProcess(_) => ErrorCode::UnknownProcess,
            AbortError::AlreadyDone(_) => ErrorCode::AlreadyDone,
        };
        ControlError::new(code, err.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn envelope_wire_format() {
        let cmd = ControlCommand::StartProcess {
            recipe: Recipe::B,
            params: RecipeOverrides {
                setpoint: Some(65.0),
                ..Default::default()
            },
        };
        let v = serde_json::to_value(&cmd).unwrap();
        assert_eq!(
            v,
            json!({"kind": "START_PROCESS", "payload": {"recipe": "B", "params": {"setpoint": 65.0}}})
        );
        assert_eq!(serde_json::from_value::<ControlCommand>(v).unwrap(), cmd);

        let pause: ControlCommand = serde_json::from_value(json!({"kind": "PAUSE"})).unwrap();
        assert_eq!(pause, ControlCommand::Pause);

        let manual: ControlCommand = serde_json::from_value(json!({
            "kind": "MANUAL_ACTUATOR",
            "payload": {"silo": "S3", "actuator": "mixer", "value": true}
        }))
        .unwrap();
        assert_eq!(
            manual,
            ControlCommand::ManualActuator {
                silo: SiloId::S3,
                actuator: Actuator::Mixer,
                value: true
            }
        );
    }

    #[test]
    fn unknown_kind_fails_to_parse() {
        assert!(serde_json::from_value::<ControlCommand>(json!({"kind": "EXPLODE"})).is_err());
    }
}
