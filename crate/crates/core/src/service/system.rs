use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use super::command::{Ack, ControlCommand, ControlError, ErrorCode};
use super::config::SystemConfig;
use super::snapshot::{PlantSnapshot, ProcessSnapshot, ResourceSnapshot, SiloSnapshot};
use crate::component::{SiloCpc, SiloSr};
use crate::plant::{Actuator, FaultSet, Plant, SiloActuators, SiloId};
use crate::process::{PlantController, ProcessId};
use crate::scan::{ComponentError, CycleRecord, ExecContext, Runnable, RunUntil, RuntimeError, ScanRuntime};

/// Order key of the silo controller at plant index `i`.
pub fn controller_order(i: usize) -> i64 {
    10 * (i as i64 + 1)
}

/// Runs after every silo controller so processes see callbacks in the cycle
/// they are emitted.
pub const PLANT_CONTROLLER_ORDER: i64 = 10_000;
/// Runs last so manual outputs win over an idle controller's all-off.
pub const MANUAL_PANEL_ORDER: i64 = 20_000;

/// Operator-held actuator outputs for silos no process has claimed.
#[derive(Debug, Default)]
pub struct ManualPanel {
    srs: BTreeMap<SiloId, Rc<RefCell<SiloSr>>>,
    held: BTreeMap<SiloId, SiloActuators>,
}

impl ManualPanel {
    pub fn held(&self, silo: SiloId) -> SiloActuators {
        self.held.get(&silo).copied().unwrap_or_default()
    }

    fn set(&mut self, silo: SiloId, actuator: Actuator, value: bool) {
        let entry = self.held.entry(silo).or_default();
        entry.set(actuator, value);
        if !entry.any() {
            self.held.remove(&silo);
        }
    }

    fn release(&mut self, silo: SiloId) {
        self.held.remove(&silo);
    }
}

impl Runnable for ManualPanel {
    fn name(&self) -> String {
        "ManualPanel".into()
    }

    fn execute(&mut self, _ctx: &mut ExecContext<'_>) -> Result<(), ComponentError> {
        for (silo, outputs) in &self.held {
            if let Some(sr) = self.srs.get(silo) {
                sr.borrow_mut()
                    .write(*outputs)
                    .map_err(|e| ComponentError(e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// The assembled plant: simulator, runtime, silo CPCs, plant controller and
/// manual panel.
pub struct LiqueurPlant {
    runtime: ScanRuntime,
    controller: Rc<RefCell<PlantController>>,
    manual: Rc<RefCell<ManualPanel>>,
    cpcs: Vec<SiloCpc>,
    last_faults: FaultSet,
    overruns: u64,
}

impl LiqueurPlant {
    pub fn new(config: &SystemConfig) -> Result<Self, RuntimeError> {
        let plant = Plant::new(config.plant.clone())?;
        let mut runtime = ScanRuntime::new(plant, config.cycle.clone())?;
        let ids: Vec<SiloId> = config.plant.silo_ids().collect();
        let cpcs: Vec<SiloCpc> = ids
            .iter()
            .map(|&id| SiloCpc::new(runtime.sr(id).expect("runtime has an SR per silo")))
            .collect();
        for (i, cpc) in cpcs.iter().enumerate() {
            runtime.register(Box::new(Rc::clone(cpc.controller())), controller_order(i))?;
        }
        let controller = Rc::new(RefCell::new(PlantController::new(
            cpcs.iter().cloned(),
            config.recipes,
        )));
        runtime.register(Box::new(Rc::clone(&controller)), PLANT_CONTROLLER_ORDER)?;
        let manual = Rc::new(RefCell::new(ManualPanel {
            srs: cpcs.iter().map(|c| (c.silo(), Rc::clone(c.sr()))).collect(),
            held: BTreeMap::new(),
        }));
        runtime.register(Box::new(Rc::clone(&manual)), MANUAL_PANEL_ORDER)?;
        Ok(LiqueurPlant {
            runtime,
            controller,
            manual,
            cpcs,
            last_faults: FaultSet::new(),
            overruns: 0,
        })
    }

    pub fn runtime(&self) -> &ScanRuntime {
        &self.runtime
    }

    /// For instrumentation: registering extra components or observers before
    /// the first cycle, or overriding the plant state.
    pub fn runtime_mut(&mut self) -> &mut ScanRuntime {
        &mut self.runtime
    }

    pub fn controller(&self) -> std::cell::Ref<'_, PlantController> {
        self.controller.borrow()
    }

    pub fn cpcs(&self) -> &[SiloCpc] {
        &self.cpcs
    }

    pub fn next_cycle(&self) -> u64 {
        self.runtime.next_cycle()
    }

    /// No live process and nothing queued to start.
    pub fn is_idle(&self) -> bool {
        let c = self.controller.borrow();
        !c.has_pending_intents() && c.processes().all(|p| p.is_terminal())
    }

    /// Applies a plant-level command between cycles. PAUSE, RESUME and
    /// STEP_N belong to the control service and are refused here.
    pub fn apply(&mut self, command: &ControlCommand) -> Result<Ack, ControlError> {
        let effective_cycle = self.runtime.next_cycle();
        match command {
            ControlCommand::StartProcess { recipe, params } => {
                let id = self.controller.borrow_mut().start_process(*recipe, params)?;
                let mut manual = self.manual.borrow_mut();
                for silo in recipe.silos() {
                    manual.release(silo);
                }
                Ok(Ack {
                    effective_cycle,
                    process: Some(id),
                })
            }
            ControlCommand::AbortProcess { process } => {
                self.controller.borrow_mut().abort_process(*process)?;
                Ok(Ack {
                    effective_cycle,
                    process: Some(*process),
                })
            }
            ControlCommand::ManualActuator {
                silo,
                actuator,
                value,
            } => {
                let cpc = self
                    .cpcs
                    .get(silo.index())
                    .filter(|c| c.silo() == *silo)
                    .ok_or_else(|| ControlError::validation(format!("plant has no silo {silo}")))?;
                if !cpc.sr().borrow().capabilities().has(*actuator) {
                    return Err(ControlError::validation(format!(
                        "{silo} has no {actuator:?} actuator"
                    )));
                }
                if let Some(owner) = self.claimed_by(*silo) {
                    return Err(ControlError::new(
                        ErrorCode::Conflict,
                        format!("{silo} is claimed by process {owner}"),
                    ));
                }
                self.manual.borrow_mut().set(*silo, *actuator, *value);
                Ok(Ack {
                    effective_cycle,
                    process: None,
                })
            }
            ControlCommand::Pause | ControlCommand::Resume | ControlCommand::StepN { .. } => {
                Err(ControlError::validation(format!(
                    "{} is only accepted by the control service",
                    command.name()
                )))
            }
        }
    }

    fn claimed_by(&self, silo: SiloId) -> Option<ProcessId> {
        let c = self.controller.borrow();
        let owner = c
            .processes()
            .find(|p| !p.is_terminal() && p.silos().any(|s| s == silo))
            .map(|p| p.id());
        owner
    }

    /// One cycle, paced by the runtime when `time_scale > 0`.
    pub fn run_cycle(&mut self) -> CycleRecord {
        let record = self.runtime.paced_cycle();
        self.record_stats(record)
    }

    /// One cycle right away, for callers that do their own pacing.
    pub fn run_cycle_now(&mut self) -> CycleRecord {
        let record = self.runtime.run_cycle();
        self.record_stats(record)
    }

    fn record_stats(&mut self, record: CycleRecord) -> CycleRecord {
        self.last_faults = record.faults.clone();
        if record.overrun {
            self.overruns += 1;
        }
        record
    }

    /// Runs cycles until `predicate` holds, checking before the first cycle
    /// and after each one.
    pub fn run_until<F>(&mut self, mut predicate: F, max_cycles: u64) -> RunUntil
    where
        F: FnMut(&LiqueurPlant) -> bool,
    {
        if predicate(self) {
            return RunUntil {
                cycles_used: 0,
                satisfied: true,
            };
        }
        for used in 1..=max_cycles {
            self.run_cycle();
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

    pub fn snapshot(&self) -> PlantSnapshot {
        let controller = self.controller.borrow();
        let manual = self.manual.borrow();
        let states = self.runtime.states();
        let sensors = self.runtime.plant().read_sensors(states);
        let silos = self
            .cpcs
            .iter()
            .zip(&self.runtime.plant().config().silos)
            .map(|(cpc, spec)| {
                let id = cpc.silo();
                let state = states[id.index()];
                SiloSnapshot {
                    id,
                    kind: cpc.kind().name().to_string(),
                    capacity: spec.capacity,
                    level: state.level,
                    temp: state.temp,
                    homogeneity: state.homogeneity,
                    sensors: sensors.silo(id),
                    actuators: cpc.sr().borrow().output(),
                    command: cpc
                        .controller()
                        .borrow()
                        .active_command()
                        .map(|c| c.kind.to_string()),
                    claimed_by: controller
                        .processes()
                        .find(|p| !p.is_terminal() && p.silos().any(|s| s == id))
                        .map(|p| p.id()),
                    manual: manual.held(id),
                }
            })
            .collect();
        let processes = controller
            .processes()
            .map(|p| ProcessSnapshot {
                id: p.id(),
                recipe: p.recipe(),
                state: p.state_name(),
                held: p.held_resources().collect(),
                batches_completed: p.batches_completed(),
            })
            .collect();
        let resources = controller
            .resources()
            .iter()
            .map(|r| ResourceSnapshot {
                kind: r.kind(),
                holder: r.holder(),
                queue: r.queue().collect(),
            })
            .collect();
        PlantSnapshot {
            cycle: self.runtime.next_cycle(),
            paused: false,
            silos,
            processes,
            resources,
            faults: self.last_faults.iter().cloned().collect(),
            overruns: self.overruns,
        }
    }
}
