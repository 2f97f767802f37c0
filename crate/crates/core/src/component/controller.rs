use std::cell::RefCell;
use std::rc::Rc;
use std::time::Duration;

use super::command::{Callback, Command, CommandKind, CommandRejection};
use super::interface::{SiloInterfaces, SiloKind};
use super::port::{Port, PortTarget};
use super::sr::{Capabilities, SiloSr};
use crate::events::Event;
use crate::plant::{SiloActuators, SiloId};
use crate::scan::{ComponentError, ExecContext, Runnable};

#[derive(Debug, Clone, Copy)]
struct ActiveCommand {
    command: Command,
    /// Execute slices with the actuator held, used by MIX.
    slices: u64,
}

/// Turns the SR's low-level I/O into fill / empty / heatToTemp / mix
/// operations with completion callbacks.
///
/// One command at a time. A new command becomes active on the controller's
/// next execute slice; CANCEL clears the output latch immediately and never
/// produces a callback.
#[derive(Debug)]
pub struct SiloController {
    silo: SiloId,
    kind: SiloKind,
    caps: Capabilities,
    sr: Rc<RefCell<SiloSr>>,
    process_port: Rc<Port>,
    driver_port: Rc<Port>,
    active: Option<ActiveCommand>,
    completed: u64,
}

impl SiloController {
    pub fn new(sr: Rc<RefCell<SiloSr>>) -> Rc<RefCell<SiloController>> {
        let (silo, caps) = {
            let sr = sr.borrow();
            (sr.silo(), sr.capabilities())
        };
        let kind = SiloKind::from_capabilities(caps.heater, caps.mixer);
        let ifs = SiloInterfaces::for_kind(kind);
        Rc::new_cyclic(|me| {
            let process_port = Port::with_target(
                format!("{silo}.itsController.itsProcessPort"),
                ifs.service.clone(),
                ifs.callbacks.clone(),
                PortTarget::Controller(me.clone()),
            );
            // Typed for completeness; the runtime links controller and SR directly.
            let driver_port = Port::detached(
                format!("{silo}.itsController.itsDriverPort"),
                ifs.ctrl_to_driver.clone(),
                ifs.driver_to_ctrl.clone(),
            );
            RefCell::new(SiloController {
                silo,
                kind,
                caps,
                sr,
                process_port,
                driver_port,
                active: None,
                completed: 0,
            })
        })
    }

    pub fn silo(&self) -> SiloId {
        self.silo
    }

    pub fn kind(&self) -> SiloKind {
        self.kind
    }

    pub fn process_port(&self) -> &Rc<Port> {
        &self.process_port
    }

    pub fn driver_port(&self) -> &Rc<Port> {
        &self.driver_port
    }

    pub fn sr(&self) -> &Rc<RefCell<SiloSr>> {
        &self.sr
    }

    pub fn is_idle(&self) -> bool {
        self.active.is_none()
    }

    pub fn active_command(&self) -> Option<Command> {
        self.active.map(|a| a.command)
    }

    /// Commands completed with a callback so far.
    pub fn completed_count(&self) -> u64 {
        self.completed
    }

    pub fn issue_command(&mut self, command: Command) -> Result<(), CommandRejection> {
        match command.kind {
            CommandKind::Cancel => {
                self.active = None;
                self.sr.borrow_mut().all_off();
                return Ok(());
            }
            CommandKind::HeatToTemp { setpoint } => {
                if !(self.caps.heater && self.caps.temp_sensor) {
                    return Err(CommandRejection::Unsupported(format!(
                        "{} has no heater with temperature sensor",
                        self.silo
                    )));
                }
                if !setpoint.is_finite() {
                    return Err(CommandRejection::InvalidArgument(
                        "setpoint must be finite".into(),
                    ));
                }
            }
            CommandKind::Mix { duration } => {
                if !self.caps.mixer {
                    return Err(CommandRejection::Unsupported(format!(
                        "{} has no mixer",
                        self.silo
                    )));
                }
                if !(duration.is_finite() && duration >= 0.0) {
                    return Err(CommandRejection::InvalidArgument(
                        "mix duration must be >= 0".into(),
                    ));
                }
            }
            CommandKind::Fill | CommandKind::Empty => {}
        }
        if self.active.is_some() {
            return Err(CommandRejection::Busy);
        }
        self.active = Some(ActiveCommand { command, slices: 0 });
        Ok(())
    }

    fn complete(&mut self, ctx: &mut ExecContext<'_>, command: Command) {
        self.active = None;
        self.completed += 1;
        let kind = command
            .kind
            .completion()
            .expect("only completable commands are active");
        ctx.emit(Event::Callback {
            silo: self.silo,
            kind,
        });
        self.process_port.notify(Callback {
            kind,
            silo: self.silo,
            cycle: ctx.cycle(),
        });
    }
}

/// Number of execute slices a timed command holds its actuator.
pub fn slices_for(duration_s: f64, period: Duration) -> u64 {
    let duration_ms = (duration_s * 1000.0).round().max(0.0) as u64;
    let period_ms = period.as_millis().max(1) as u64;
    duration_ms.div_ceil(period_ms)
}

impl Runnable for SiloController {
    fn name(&self) -> String {
        format!("{}Controller_{}", self.kind.name(), self.silo)
    }

    fn execute(&mut self, ctx: &mut ExecContext<'_>) -> Result<(), ComponentError> {
        let input = self.sr.borrow().input();
        let mut outputs = SiloActuators::default();
        if let Some(mut active) = self.active {
            let command = active.command;
            let done = match command.kind {
                CommandKind::Fill => {
                    outputs.in_valve = !input.full;
                    input.full
                }
                CommandKind::Empty => {
                    outputs.out_valve = !input.empty;
                    input.empty
                }
                CommandKind::HeatToTemp { setpoint } => {
                    let reached = input.temp.is_some_and(|t| t >= setpoint);
                    outputs.heater = !reached;
                    reached
                }
                CommandKind::Mix { duration } => {
                    if active.slices >= slices_for(duration, ctx.period()) {
                        true
                    } else {
                        outputs.mixer = true;
                        active.slices += 1;
                        self.active = Some(active);
                        false
                    }
                }
                CommandKind::Cancel => unreachable!("cancel is never active"),
            };
            if done {
                self.complete(ctx, command);
            }
        }
        self.sr
            .borrow_mut()
            .write(outputs)
            .map_err(|e| ComponentError(e.to_string()))
    }
}
