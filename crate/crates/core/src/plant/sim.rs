use serde::{Deserialize, Serialize};

use super::config::{ConfigError, PlantConfig, SiloId};
use super::image::{
    Actuator, ActuatorImage, Fault, FaultSet, SensorImage, SiloActuators, SiloSensors, SiloState,
};

/// Liquid moved through the shared pipe during one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Flow {
    /// Raw liquid from the supply inlet into `dest`.
    Supply { dest: SiloId, amount: f64 },
    /// Liquid from `source` out through the product outlet.
    Drain { source: SiloId, amount: f64 },
    /// Silo-to-silo transfer.
    Transfer {
        source: SiloId,
        dest: SiloId,
        amount: f64,
    },
}

/// Result of one plant step. Faults are part of the value: `step` never fails.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub states: Vec<SiloState>,
    pub faults: FaultSet,
    pub flows: Vec<Flow>,
}

/// Discrete-time model of the silos and their shared pipe.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    config: PlantConfig,
}

impl Plant {
    pub fn new(config: PlantConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        Ok(Plant { config })
    }

    pub fn config(&self) -> &PlantConfig {
        &self.config
    }

    pub fn silo_count(&self) -> usize {
        self.config.silos.len()
    }

    /// Every silo empty at its ambient temperature.
    pub fn initial_states(&self) -> Vec<SiloState> {
        self.config
            .silos
            .iter()
            .map(|s| SiloState::empty_at(s.ambient_temp))
            .collect()
    }

    pub fn read_sensors(&self, states: &[SiloState]) -> SensorImage {
        assert_eq!(states.len(), self.silo_count(), "state vector size mismatch");
        SensorImage(
            self.config
                .silos
                .iter()
                .zip(states)
                .map(|(spec, state)| SiloSensors {
                    empty: state.level <= spec.low_threshold,
                    full: state.level >= spec.high_threshold,
                    temp: spec.has_temp_sensor.then_some(state.temp),
                })
                .collect(),
        )
    }

    /// Advances the plant by `dt` seconds with explicit Euler.
    ///
    /// Flows are resolved first on the old levels. Heating, cooling and mixing
    /// then act on the post-flow temperature, with dry checks against the old
    /// level. Illegal heater/mixer requests are ignored and reported.
    pub fn step(&self, states: &[SiloState], actuators: &ActuatorImage, dt: f64) -> StepOutcome {
        assert!(dt.is_finite() && dt > 0.0, "dt must be positive, got {dt}");
        let n = self.silo_count();
        assert_eq!(states.len(), n, "state vector size mismatch");
        assert_eq!(actuators.0.len(), n, "actuator image size mismatch");

        let specs = &self.config.silos;
        let mut faults = FaultSet::new();

        let effective: Vec<SiloActuators> = specs
            .iter()
            .zip(&actuators.0)
            .map(|(spec, requested)| {
                let mut act = *requested;
                if act.heater && !spec.has_heater {
                    faults.insert(Fault::IllegalActuator {
                        silo: spec.id,
                        actuator: Actuator::Heater,
                    });
                    act.heater = false;
                }
                if act.mixer && !spec.has_mixer {
                    faults.insert(Fault::IllegalActuator {
                        silo: spec.id,
                        actuator: Actuator::Mixer,
                    });
                    act.mixer = false;
                }
                act
            })
            .collect();

        let sources: Vec<usize> = (0..n).filter(|&i| effective[i].out_valve).collect();
        let dests: Vec<usize> = (0..n).filter(|&i| effective[i].in_valve).collect();

        // (amount in, temperature of incoming liquid) and amount out, per silo
        let mut inflow = vec![(0.0_f64, 0.0_f64); n];
        let mut outflow = vec![0.0_f64; n];
        let mut flows = Vec::new();

        match (sources.as_slice(), dests.as_slice()) {
            ([], []) => {}
            ([], dests) => {
                for &d in dests {
                    let room = (specs[d].capacity - states[d].level).max(0.0);
                    let amount = (specs[d].fill_rate * dt).min(room);
                    inflow[d] = (amount, self.config.supply_temp);
                    flows.push(Flow::Supply {
                        dest: specs[d].id,
                        amount,
                    });
                }
            }
            (sources, []) => {
                for &s in sources {
                    let amount = (specs[s].drain_rate * dt).min(states[s].level.max(0.0));
                    outflow[s] = amount;
                    flows.push(Flow::Drain {
                        source: specs[s].id,
                        amount,
                    });
                }
            }
            // IN and OUT of the same silo: liquid would circulate, nothing moves.
            ([s], [d]) if s == d => {}
            (&[s], &[d]) => {
                let rate = specs[s].drain_rate.min(specs[d].fill_rate);
                let room = (specs[d].capacity - states[d].level).max(0.0);
                let amount = (rate * dt).min(states[s].level.max(0.0)).min(room);
                outflow[s] = amount;
                inflow[d] = (amount, states[s].temp);
                flows.push(Flow::Transfer {
                    source: specs[s].id,
                    dest: specs[d].id,
                    amount,
                });
            }
            (sources, dests) => {
                if sources.len() > 1 {
                    faults.insert(Fault::PipeMultiSource);
                }
                if dests.len() > 1 {
                    faults.insert(Fault::PipeMultiDest);
                }
            }
        }

        let dry_level = self.config.dry_level;
        let next = specs
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let old = states[i];
                let act = effective[i];
                let (in_amount, in_temp) = inflow[i];

                let resident = old.level - outflow[i];
                let mut level = resident + in_amount;
                let mixed_temp = if in_amount > 0.0 && level > 0.0 {
                    (resident * old.temp + in_amount * in_temp) / level
                } else {
                    old.temp
                };

                let mut temp = mixed_temp;
                if act.heater {
                    if old.level > dry_level {
                        temp += spec.heat_rate * dt;
                    } else {
                        faults.insert(Fault::DryHeating { silo: spec.id });
                    }
                }
                temp += (spec.ambient_temp - mixed_temp) * dt / spec.cooling_time_constant;

                let homogeneity = if in_amount > 0.0 {
                    0.0
                } else if act.mixer && old.level > dry_level {
                    (old.homogeneity + dt / self.config.mix_time_constant).min(1.0)
                } else {
                    old.homogeneity
                };

                level = level.clamp(0.0, spec.capacity);
                if act.in_valve && level >= spec.capacity {
                    faults.insert(Fault::OverflowRisk { silo: spec.id });
                }

                SiloState {
                    level,
                    temp,
                    homogeneity: homogeneity.clamp(0.0, 1.0),
                }
            })
            .collect();

        StepOutcome {
            states: next,
            faults,
            flows,
        }
    }
}
