use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plant::{Actuator, SiloActuators, SiloId, SiloSensors, SiloSpec};

/// Identity information of the physical unit behind an SR.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrMetadata {
    pub model_type: String,
    pub manufacturer: String,
    pub serial_number: String,
    pub dimensions: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub heater: bool,
    pub mixer: bool,
    pub temp_sensor: bool,
}

impl Capabilities {
    pub fn of(spec: &SiloSpec) -> Self {
        Capabilities {
            heater: spec.has_heater,
            mixer: spec.has_mixer,
            temp_sensor: spec.has_temp_sensor,
        }
    }

    pub fn has(&self, actuator: Actuator) -> bool {
        match actuator {
            Actuator::InValve | Actuator::OutValve => true,
            Actuator::Heater => self.heater,
            Actuator::Mixer => self.mixer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("silo {silo} has no {actuator:?}")]
pub struct MissingActuator {
    pub silo: SiloId,
    pub actuator: Actuator,
}

/// Software representative of one physical silo.
///
/// Holds the silo's slice of the sensor image captured at READ and latches
/// its slice of the actuator image until WRITE. It adds no behavior.
#[derive(Debug, Clone)]
pub struct SiloSr {
    silo: SiloId,
    caps: Capabilities,
    input: SiloSensors,
    output: SiloActuators,
    metadata: SrMetadata,
}

impl SiloSr {
    pub fn new(spec: &SiloSpec) -> Self {
        SiloSr {
            silo: spec.id,
            caps: Capabilities::of(spec),
            input: SiloSensors::default(),
            output: SiloActuators::default(),
            metadata: SrMetadata {
                model_type: crate::component::SiloKind::from_capabilities(
                    spec.has_heater,
                    spec.has_mixer,
                )
                .name()
                .to_string(),
                manufacturer: "simulated".to_string(),
                serial_number: format!("SIM-{}", spec.id),
                dimensions: format!("{} L", spec.capacity),
            },
        }
    }

    pub fn silo(&self) -> SiloId {
        self.silo
    }

    pub fn capabilities(&self) -> Capabilities {
        self.caps
    }

    pub fn metadata(&self) -> &SrMetadata {
        &self.metadata
    }

    pub fn set_metadata(&mut self, metadata: SrMetadata) {
        self.metadata = metadata;
    }

    pub fn input(&self) -> SiloSensors {
        self.input
    }

    pub fn is_empty(&self) -> bool {
        self.input.empty
    }

    pub fn is_full(&self) -> bool {
        self.input.full
    }

    pub fn temperature(&self) -> Option<f64> {
        self.input.temp
    }

    pub fn output(&self) -> SiloActuators {
        self.output
    }

    pub fn set(&mut self, actuator: Actuator, value: bool) -> Result<(), MissingActuator> {
        if value && !self.caps.has(actuator) {
            return Err(MissingActuator {
                silo: self.silo,
                actuator,
            });
        }
        self.output.set(actuator, value);
        Ok(())
    }

    /// Latches a whole output slice; nothing changes on error.
    pub fn write(&mut self, outputs: SiloActuators) -> Result<(), MissingActuator> {
        if let Some(actuator) = Actuator::ALL
            .into_iter()
            .find(|&a| outputs.get(a) && !self.caps.has(a))
        {
            return Err(MissingActuator {
                silo: self.silo,
                actuator,
            });
        }
        self.output = outputs;
        Ok(())
    }

    pub fn all_off(&mut self) {
        self.output = SiloActuators::default();
    }

    pub(crate) fn latch_input(&mut self, sensors: SiloSensors) {
        self.input = sensors;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::PlantConfig;

    #[test]
    fn refuses_actuators_the_silo_lacks() {
        let config = PlantConfig::default();
        let mut sr = SiloSr::new(&config.silos[0]);
        assert!(sr.set(Actuator::Heater, true).is_err());
        assert!(sr.set(Actuator::Heater, false).is_ok());
        assert!(sr
            .write(SiloActuators {
                mixer: true,
                ..Default::default()
            })
            .is_err());
        assert_eq!(sr.output(), SiloActuators::default());
        sr.set(Actuator::InValve, true).unwrap();
        assert!(sr.output().in_valve);
    }

    #[test]
    fn metadata_describes_the_unit() {
        let config = PlantConfig::default();
        let sr = SiloSr::new(&config.silos[3]);
        assert_eq!(sr.metadata().model_type, "MHSilo");
        assert_eq!(sr.metadata().serial_number, "SIM-S4");
    }
}
