use serde::{Deserialize, Serialize};

use crate::plant::{Fault, SiloActuators, SiloId, SiloSensors};
use crate::process::{ProcessId, Recipe, ResourceKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiloSnapshot {
    pub id: SiloId,
    /// Component type, e.g. `MHSilo`.
    pub kind: String,
    pub capacity: f64,
    pub level: f64,
    pub temp: f64,
    pub homogeneity: f64,
    pub sensors: SiloSensors,
    pub actuators: SiloActuators,
    /// Operation the controller is executing, if any.
    pub command: Option<String>,
    pub claimed_by: Option<ProcessId>,
    /// Actuators held by the manual panel.
    pub manual: SiloActuators,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSnapshot {
    pub id: ProcessId,
    pub recipe: Recipe,
    pub state: String,
    pub held: Vec<ResourceKind>,
    pub batches_completed: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceSnapshot {
    pub kind: ResourceKind,
    pub holder: Option<ProcessId>,
    pub queue: Vec<ProcessId>,
}

/// Observable state of the whole system between two cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantSnapshot {
    /// Index the next cycle will carry (= cycles run so far).
    pub cycle: u64,
    pub paused: bool,
    pub silos: Vec<SiloSnapshot>,
    pub processes: Vec<ProcessSnapshot>,
    pub resources: Vec<ResourceSnapshot>,
    /// Faults of the last completed cycle.
    pub faults: Vec<Fault>,
    pub overruns: u64,
}

impl PlantSnapshot {
    pub fn silo(&self, id: SiloId) -> Option<&SiloSnapshot> {
        self.silos.iter().find(|s| s.id == id)
    }

    pub fn process(&self, id: ProcessId) -> Option<&ProcessSnapshot> {
        self.processes.iter().find(|p| p.id == id)
    }
}
