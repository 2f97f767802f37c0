use std::cell::RefCell;
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::rc::Rc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::pacer::Pacer;
use super::runnable::{ExecContext, Runnable};
use crate::component::SiloSr;
use crate::events::Event;
use crate::plant::{
    ActuatorImage, ConfigError, Fault, FaultSet, Flow, Plant, SensorImage, SiloId, SiloState,
};

/// Task timing of the scan loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    #[serde(default = "default_period_ms")]
    pub period_ms: u64,
    /// Wall-clock interval = period × time_scale; 0 runs back to back.
    #[serde(default = "default_time_scale")]
    pub time_scale: f64,
    #[serde(default)]
    pub max_cycles: Option<u64>,
}

fn default_period_ms() -> u64 {
    500
}

fn default_time_scale() -> f64 {
    1.0
}

impl Default for CycleConfig {
    fn default() -> Self {
        CycleConfig {
            period_ms: default_period_ms(),
            time_scale: default_time_scale(),
            max_cycles: None,
        }
    }
}

impl CycleConfig {
    pub fn headless(period_ms: u64) -> Self {
        CycleConfig {
            period_ms,
            time_scale: 0.0,
            max_cycles: None,
        }
    }

    pub fn period(&self) -> Duration {
        Duration::from_millis(self.period_ms)
    }

    /// Simulated seconds per cycle.
    pub fn dt(&self) -> f64 {
        self.period_ms as f64 / 1000.0
    }

    pub fn wall_interval(&self) -> Duration {
        self.period().mul_f64(self.time_scale)
    }

    pub fn validate(&self) -> Result<(), RuntimeError> {
        if self.period_ms == 0 {
            return Err(RuntimeError::InvalidConfig("period_ms must be positive".into()));
        }
        if !(self.time_scale.is_finite() && self.time_scale >= 0.0) {
            return Err(RuntimeError::InvalidConfig("time_scale must be >= 0".into()));
        }
        Ok(())
    }
}

/// Outcome of one READ / EXECUTE / WRITE cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle_index: u64,
    /// Milliseconds since the Unix epoch at the start of READ.
    pub wall_start_ms: f64,
    pub exec_duration_ms: f64,
    pub overrun: bool,
    pub faults: FaultSet,
    /// Sensor image captured at READ.
    pub sensors: SensorImage,
    /// Actuator image applied at WRITE.
    pub actuators: ActuatorImage,
    pub flows: Vec<Flow>,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("order key {0} is already registered")]
    DuplicateOrderKey(i64),
    #[error("runtime has already started")]
    RuntimeAlreadyStarted,
    #[error("invalid cycle configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Plant(#[from] ConfigError),
}

impl RuntimeError {
    pub fn code(&self) -> &'static str {
        match self {
            RuntimeError::DuplicateOrderKey(_) => "DUPLICATE_ORDER_KEY",
            RuntimeError::RuntimeAlreadyStarted => "RUNTIME_ALREADY_STARTED",
            RuntimeError::InvalidConfig(_) | RuntimeError::Plant(_) => "INVALID_CONFIG",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationHandle {
    pub name: String,
    pub order_key: i64,
}

/// Hooks into the phases of each cycle, for logging and instrumentation.
pub trait CycleObserver {
    fn after_read(&mut self, _cycle: u64, _states: &[SiloState], _sensors: &SensorImage) {}
    fn before_write(&mut self, _cycle: u64, _states: &[SiloState], _actuators: &ActuatorImage) {}
    fn after_write(&mut self, _record: &CycleRecord, _states: &[SiloState]) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunUntil {
    pub cycles_used: u64,
    pub satisfied: bool,
}

struct Entry {
    name: String,
    component: Box<dyn Runnable>,
}

/// Time-triggered executor owning the plant state, the SRs and every
/// registered component.
pub struct ScanRuntime {
    config: CycleConfig,
    plant: Plant,
    states: Vec<SiloState>,
    srs: Vec<Rc<RefCell<SiloSr>>>,
    components: BTreeMap<i64, Entry>,
    observers: Vec<Box<dyn CycleObserver>>,
    started: bool,
    next_cycle: u64,
    pacer: Pacer,
}

impl ScanRuntime {
    pub fn new(plant: Plant, config: CycleConfig) -> Result<Self, RuntimeError> {
        config.validate()?;
        plant.config().validate_step(config.dt())?;
        let states = plant.initial_states();
        let srs = plant
            .config()
            .silos
            .iter()
            .map(|spec| Rc::new(RefCell::new(SiloSr::new(spec))))
            .collect();
        let pacer = Pacer::new(config.wall_interval());
        Ok(ScanRuntime {
            config,
            plant,
            states,
            srs,
            components: BTreeMap::new(),
            observers: Vec::new(),
            started: false,
            next_cycle: 0,
            pacer,
        })
    }

    pub fn config(&self) -> &CycleConfig {
        &self.config
    }

    pub fn plant(&self) -> &Plant {
        &self.plant
    }

    pub fn states(&self) -> &[SiloState] {
        &self.states
    }

    /// Overwrites the plant state between cycles (test rigs, initial
    /// conditions).
    pub fn set_states(&mut self, states: Vec<SiloState>) {
        assert_eq!(states.len(), self.plant.silo_count());
        self.states = states;
    }

    pub fn sr(&self, silo: SiloId) -> Option<Rc<RefCell<SiloSr>>> {
        self.srs.get(silo.index()).cloned()
    }

    /// Index the next cycle will carry.
    pub fn next_cycle(&self) -> u64 {
        self.next_cycle
    }

    pub fn is_started(&self) -> bool {
        self.started
    }

    pub fn component_names(&self) -> Vec<(i64, String)> {
        self.components
            .iter()
            .map(|(k, e)| (*k, e.name.clone()))
            .collect()
    }

    pub fn register(
        &mut self,
        component: Box<dyn Runnable>,
        order_key: i64,
    ) -> Result<RegistrationHandle, RuntimeError> {
        if self.started {
            return Err(RuntimeError::RuntimeAlreadyStarted);
        }
        if self.components.contains_key(&order_key) {
            return Err(RuntimeError::DuplicateOrderKey(order_key));
        }
        let name = component.name();
        self.components.insert(
            order_key,
            Entry {
                name: name.clone(),
                component,
            },
        );
        Ok(RegistrationHandle { name, order_key })
    }

    pub fn add_observer(&mut self, observer: Box<dyn CycleObserver>) {
        self.observers.push(observer);
    }

    pub fn run_cycle(&mut self) -> CycleRecord {
        self.started = true;
        let cycle = self.next_cycle;
        let wall_start_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64() * 1000.0)
            .unwrap_or_default();
        let t0 = Instant::now();

        // READ
        let sensors = self.plant.read_sensors(&self.states);
        for (index, sr) in self.srs.iter().enumerate() {
            sr.borrow_mut().latch_input(sensors.0[index]);
        }
        for obs in &mut self.observers {
            obs.after_read(cycle, &self.states, &sensors);
        }

        // EXECUTE
        let mut events = Vec::new();
        let mut component_faults = FaultSet::new();
        let period = self.config.period();
        for entry in self.components.values_mut() {
            let mut ctx = ExecContext::new(cycle, period, &mut events);
            let outcome = catch_unwind(AssertUnwindSafe(|| entry.component.execute(&mut ctx)));
            let failure = match outcome {
                Ok(Ok(())) => None,
                Ok(Err(err)) => Some(err.0),
                Err(panic) => Some(panic_message(panic.as_ref())),
            };
            if let Some(message) = failure {
                log::warn!("component {} failed in cycle {cycle}: {message}", entry.name);
                component_faults.insert(Fault::ComponentFailure {
                    component: entry.name.clone(),
                    message,
                });
            }
        }

        // WRITE
        let actuators = ActuatorImage(self.srs.iter().map(|sr| sr.borrow().output()).collect());
        for obs in &mut self.observers {
            obs.before_write(cycle, &self.states, &actuators);
        }
        let outcome = self.plant.step(&self.states, &actuators, self.config.dt());
        self.states = outcome.states;
        let mut faults = outcome.faults;
        faults.extend(component_faults);

        let exec_duration = t0.elapsed();
        let record = CycleRecord {
            cycle_index: cycle,
            wall_start_ms,
            exec_duration_ms: exec_duration.as_secs_f64() * 1000.0,
            overrun: exec_duration > period,
            faults,
            sensors,
            actuators,
            flows: outcome.flows,
            events,
        };
        for obs in &mut self.observers {
            obs.after_write(&record, &self.states);
        }
        self.next_cycle += 1;
        record
    }

    /// Runs paced cycles (back to back when time_scale is 0) until
    /// `predicate` holds or `max_cycles` have run. The predicate is checked
    /// before the first cycle and after each one.
    pub fn run_until<F>(&mut self, mut predicate: F, max_cycles: u64) -> RunUntil
    where
        F: FnMut(&ScanRuntime) -> bool,
    {
        assert!(max_cycles > 0, "max_cycles must be positive");
        if predicate(self) {
            return RunUntil {
                cycles_used: 0,
                satisfied: true,
            };
        }
        for used in 1..=max_cycles {
            self.paced_cycle();
            if predicate(self) {
                return RunUntil {
                    cycles_used: used,
                    satisfied: true,
                };
            }
        }
        RunUntil {
            cycles_used: max_cycles,
            satisfied: false,
        }
    }

    /// One cycle, after waiting for it to fall due when pacing is enabled.
    pub fn paced_cycle(&mut self) -> CycleRecord {
        if self.config.time_scale > 0.0 {
            self.pacer.wait();
        }
        self.run_cycle()
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = payload.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic".to_string()
    }
}
