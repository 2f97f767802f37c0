//! Records emitted by components during EXECUTE, carried in the cycle log and
//! the event stream.

use serde::{Deserialize, Serialize};

use crate::component::{CallbackKind, CommandKind, CommandRejection};
use crate::plant::SiloId;
use crate::process::{ProcessId, Recipe, ResourceKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Callback {
        silo: SiloId,
        kind: CallbackKind,
    },
    CommandIssued {
        process: ProcessId,
        silo: SiloId,
        command: CommandKind,
    },
    CommandRejected {
        process: ProcessId,
        silo: SiloId,
        command: CommandKind,
        rejection: CommandRejection,
    },
    Cancelled {
        process: ProcessId,
        silo: SiloId,
    },
    ResourceRequested {
        resource: ResourceKind,
        process: ProcessId,
    },
    ResourceGranted {
        resource: ResourceKind,
        process: ProcessId,
    },
    ResourceReleased {
        resource: ResourceKind,
        process: ProcessId,
    },
    Transition {
        process: ProcessId,
        recipe: Recipe,
        from: String,
        to: String,
    },
    Warning {
        process: ProcessId,
        message: String,
    },
}
