use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::config::SiloId;

/// Continuous physical state of one silo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiloState {
    /// Liters.
    pub level: f64,
    /// Degrees C.
    pub temp: f64,
    /// 0 = freshly filled, 1 = fully mixed.
    pub homogeneity: f64,
}

impl SiloState {
    pub fn empty_at(temp: f64) -> Self {
        SiloState {
            level: 0.0,
            temp,
            homogeneity: 0.0,
        }
    }
}

/// Output latch for one silo: IN_i, OUT_i, R_i, M_i.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiloActuators {
    pub in_valve: bool,
    pub out_valve: bool,
    pub heater: bool,
    pub mixer: bool,
}

impl SiloActuators {
    pub fn get(&self, actuator: Actuator) -> bool {
        match actuator {
            Actuator::InValve => self.in_valve,
            Actuator::OutValve => self.out_valve,
            Actuator::Heater => self.heater,
            Actuator::Mixer => self.mixer,
        }
    }

    pub fn set(&mut self, actuator: Actuator, value: bool) {
        match actuator {
            Actuator::InValve => self.in_valve = value,
            Actuator::OutValve => self.out_valve = value,
            Actuator::Heater => self.heater = value,
            Actuator::Mixer => self.mixer = value,
        }
    }

    pub fn any(&self) -> bool {
        self.in_valve || self.out_valve || self.heater || self.mixer
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actuator {
    InValve,
    OutValve,
    Heater,
    Mixer,
}

impl Actuator {
    pub const ALL: [Actuator; 4] = [
        Actuator::InValve,
        Actuator::OutValve,
        Actuator::Heater,
        Actuator::Mixer,
    ];
}

/// Actuator process image, one entry per silo in plant order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActuatorImage(pub Vec<SiloActuators>);

impl ActuatorImage {
    pub fn all_off(silos: usize) -> Self {
        ActuatorImage(vec![SiloActuators::default(); silos])
    }

    pub fn silo(&self, id: SiloId) -> SiloActuators {
        self.0.get(id.index()).copied().unwrap_or_default()
    }

    pub fn silo_mut(&mut self, id: SiloId) -> &mut SiloActuators {
        &mut self.0[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (SiloId, &SiloActuators)> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, a)| (SiloId::from_index(i), a))
    }
}

/// Sensor readings for one silo: E_i, F_i and T_i when fitted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SiloSensors {
    pub empty: bool,
    pub full: bool,
    pub temp: Option<f64>,
}

/// Sensor process image, one entry per silo in plant order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SensorImage(pub Vec<SiloSensors>);

impl SensorImage {
    pub fn silo(&self, id: SiloId) -> SiloSensors {
        self.0.get(id.index()).copied().unwrap_or_default()
    }
}

/// Abnormal situations detected during one plant step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Fault {
    PipeMultiSource,
    PipeMultiDest,
    DryHeating { silo: SiloId },
    OverflowRisk { silo: SiloId },
    IllegalActuator { silo: SiloId, actuator: Actuator },
    /// A runnable returned an error or panicked during EXECUTE.
    ComponentFailure { component: String, message: String },
}

impl Fault {
    pub fn code(&self) -> &'static str {
        match self {
            Fault::PipeMultiSource => "PIPE_MULTI_SOURCE",
            Fault::PipeMultiDest => "PIPE_MULTI_DEST",
            Fault::DryHeating { .. } => "DRY_HEATING",
            Fault::OverflowRisk { .. } => "OVERFLOW_RISK",
            Fault::IllegalActuator { .. } => "ILLEGAL_ACTUATOR",
            Fault::ComponentFailure { .. } => "COMPONENT_FAILURE",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FaultSet(BTreeSet<Fault>);

impl FaultSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, fault: Fault) {
        self.0.insert(fault);
    }

    pub fn extend(&mut self, other: FaultSet) {
        self.0.extend(other.0);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, fault: &Fault) -> bool {
        self.0.contains(fault)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.0.iter().any(|f| f.code() == code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fault> {
        self.0.iter()
    }
}

impl FromIterator<Fault> for FaultSet {
    fn from_iter<I: IntoIterator<Item = Fault>>(iter: I) -> Self {
        FaultSet(iter.into_iter().collect())
    }
}
