use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, oneshot, watch};

use super::command::{Ack, ControlCommand, ControlError, ErrorCode};
use super::config::SystemConfig;
use super::runlog::{AppliedCommand, CycleLogLine, RunLog};
use super::snapshot::PlantSnapshot;
use super::system::LiqueurPlant;
use crate::events::Event;
use crate::plant::Fault;
use crate::scan::{Pacer, RuntimeError};

/// Buffered messages per event-stream subscriber before it is dropped.
pub const EVENT_CAPACITY: usize = 64;

/// Per-cycle message on the event stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamMessage {
    pub cycle: u64,
    pub overrun: bool,
    pub commands: Vec<AppliedCommand>,
    pub events: Vec<Event>,
    pub faults: Vec<Fault>,
    pub snapshot: PlantSnapshot,
}

enum Request {
    Command {
        command: ControlCommand,
        received_at_ms: f64,
        reply: oneshot::Sender<Result<Ack, ControlError>>,
    },
    Shutdown,
}

/// Runs the plant on a dedicated thread. Commands are queued and applied in
/// the gap between two cycles; state is published through a watch channel
/// and per-cycle messages through a bounded broadcast channel.
pub struct ControlService {
    requests: mpsc::Sender<Request>,
    snapshot: watch::Receiver<PlantSnapshot>,
    events: broadcast::Sender<Arc<StreamMessage>>,
    thread: Option<JoinHandle<()>>,
}

impl ControlService {
    pub fn spawn(config: SystemConfig) -> Result<Self, RuntimeError> {
        Self::spawn_with(config, |_| {})
    }

    /// Like [`spawn`](Self::spawn), running `setup` on the freshly built
    /// plant inside the control thread before the first cycle.
    pub fn spawn_with<F>(config: SystemConfig, setup: F) -> Result<Self, RuntimeError>
    where
        F: FnOnce(&mut LiqueurPlant) + Send + 'static,
    {
        let (req_tx, req_rx) = mpsc::channel();
        let (ready_tx, ready_rx) = mpsc::sync_channel(1);
        let (events, _) = broadcast::channel(EVENT_CAPACITY);
        let events_tx = events.clone();
        let thread = std::thread::Builder::new()
            .name("control".into())
            .spawn(move || {
                let mut plant = match LiqueurPlant::new(&config) {
                    Ok(p) => p,
                    Err(err) => {
                        let _ = ready_tx.send(Err(err));
                        return;
                    }
                };
                setup(&mut plant);
                let (snap_tx, snap_rx) = watch::channel(plant.snapshot());
                if ready_tx.send(Ok(snap_rx)).is_err() {
                    return;
                }
                Worker::new(plant, &config, snap_tx, events_tx).run(req_rx);
            })
            .expect("spawn control thread");
        let snapshot = ready_rx
            .recv()
            .expect("control thread reports readiness")?;
        Ok(ControlService {
            requests: req_tx,
            snapshot,
            events,
            thread: Some(thread),
        })
    }

    fn enqueue(
        &self,
        command: ControlCommand,
    ) -> Result<oneshot::Receiver<Result<Ack, ControlError>>, ControlError> {
        let (reply, rx) = oneshot::channel();
        let received_at_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64() * 1000.0)
            .unwrap_or_default();
        self.requests
            .send(Request::Command {
                command,
                received_at_ms,
                reply,
            })
            .map_err(|_| not_ready())?;
        Ok(rx)
    }

    /// Queues a command for the gap before the next cycle and waits for
    /// the verdict.
    pub async fn submit(&self, command: ControlCommand) -> Result<Ack, ControlError> {
        self.enqueue(command)?.await.map_err(|_| not_ready())?
    }

    pub fn submit_blocking(&self, command: ControlCommand) -> Result<Ack, ControlError> {
        self.enqueue(command)?
            .blocking_recv()
            .map_err(|_| not_ready())?
    }

    /// Latest published state, even before the first cycle.
    pub fn snapshot(&self) -> PlantSnapshot {
        self.snapshot.borrow().clone()
    }

    /// Latest cycle-boundary state; SERVICE_NOT_READY until a cycle has
    /// completed or after the control thread stopped.
    pub fn state(&self) -> Result<PlantSnapshot, ControlError> {
        if !self.is_running() {
            return Err(not_ready());
        }
        let snap = self.snapshot.borrow();
        if snap.cycle == 0 {
            return Err(ControlError::new(
                ErrorCode::ServiceNotReady,
                "no cycle has completed yet",
            ));
        }
        Ok(snap.clone())
    }

    pub fn watch(&self) -> watch::Receiver<PlantSnapshot> {
        self.snapshot.clone()
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Arc<StreamMessage>> {
        self.events.subscribe()
    }

    pub fn is_running(&self) -> bool {
        self.thread.as_ref().is_some_and(|t| !t.is_finished())
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        let _ = self.requests.send(Request::Shutdown);
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

impl Drop for ControlService {
    fn drop(&mut self) {
        self.stop();
    }
}

fn not_ready() -> ControlError {
    ControlError::new(ErrorCode::ServiceNotReady, "control service is not running")
}

struct Worker {
    plant: LiqueurPlant,
    pacer: Pacer,
    max_cycles: Option<u64>,
    paused: bool,
    step_budget: u64,
    applied: Vec<AppliedCommand>,
    log: Option<RunLog>,
    snapshot: watch::Sender<PlantSnapshot>,
    events: broadcast::Sender<Arc<StreamMessage>>,
}

impl Worker {
    fn new(
        plant: LiqueurPlant,
        config: &SystemConfig,
        snapshot: watch::Sender<PlantSnapshot>,
        events: broadcast::Sender<Arc<StreamMessage>>,
    ) -> Self {
        let log = config.log.path.as_ref().and_then(|path| {
            RunLog::create(path, config.log.max_bytes, config.log.max_files)
                .map_err(|e| log::error!("run log {} disabled: {e}", path.display()))
                .ok()
        });
        Worker {
            plant,
            pacer: Pacer::new(config.cycle.wall_interval()),
            max_cycles: config.cycle.max_cycles,
            paused: false,
            step_budget: 0,
            applied: Vec::new(),
            log,
            snapshot,
            events,
        }
    }

    fn may_cycle(&self) -> bool {
        let under_limit = self.max_cycles.is_none_or(|m| self.plant.next_cycle() < m);
        under_limit && (!self.paused || self.step_budget > 0)
    }

    fn run(mut self, requests: mpsc::Receiver<Request>) {
        loop {
            if !self.may_cycle() {
                match requests.recv() {
                    Ok(req) => {
                        if !self.handle(req) {
                            break;
                        }
                    }
                    Err(_) => break,
                }
                continue;
            }
            let remaining = self.pacer.remaining();
            let next = if remaining.is_zero() {
                requests.try_recv().map_err(|e| match e {
                    mpsc::TryRecvError::Empty => RecvTimeoutError::Timeout,
                    mpsc::TryRecvError::Disconnected => RecvTimeoutError::Disconnected,
                })
            } else {
                requests.recv_timeout(remaining)
            };
            match next {
                Ok(req) => {
                    if !self.handle(req) {
                        break;
                    }
                    continue;
                }
                Err(RecvTimeoutError::Disconnected) => break,
                Err(RecvTimeoutError::Timeout) => {}
            }
            self.pacer.mark_start();
            self.cycle();
        }
        if let Some(log) = &mut self.log {
            let _ = log.flush();
        }
    }

    /// Returns `false` on shutdown.
    fn handle(&mut self, req: Request) -> bool {
        let (command, received_at_ms, reply) = match req {
            Request::Shutdown => return false,
            Request::Command {
                command,
                received_at_ms,
                reply,
            } => (command, received_at_ms, reply),
        };
        let effective_cycle = self.plant.next_cycle();
        let ack = Ack {
            effective_cycle,
            process: None,
        };
        let result = match &command {
            ControlCommand::Pause => {
                self.paused = true;
                self.step_budget = 0;
                Ok(ack)
            }
            ControlCommand::Resume => {
                self.paused = false;
                self.step_budget = 0;
                Ok(ack)
            }
            ControlCommand::StepN { n } => {
                if !self.paused {
                    Err(ControlError::new(
                        ErrorCode::Conflict,
                        "stepping requires the simulation to be paused",
                    ))
                } else if *n == 0 {
                    Err(ControlError::validation("n must be positive"))
                } else {
                    self.step_budget += n;
                    Ok(ack)
                }
            }
            other => self.plant.apply(other),
        };
        self.applied.push(AppliedCommand {
            command,
            received_at_ms: Some(received_at_ms),
            outcome: (&result).into(),
        });
        // Publish first so a caller reading state after the reply sees it.
        self.publish_snapshot();
        let _ = reply.send(result);
        true
    }

    fn current_snapshot(&self) -> PlantSnapshot {
        let mut snap = self.plant.snapshot();
        snap.paused = self.paused;
        snap
    }

    fn publish_snapshot(&self) {
        self.snapshot.send_replace(self.current_snapshot());
    }

    fn cycle(&mut self) {
        let record = self.plant.run_cycle_now();
        if self.step_budget > 0 {
            self.step_budget -= 1;
        }
        let snapshot = self.current_snapshot();
        let commands = std::mem::take(&mut self.applied);
        let message = StreamMessage {
            cycle: record.cycle_index,
            overrun: record.overrun,
            commands: commands.clone(),
            events: record.events.clone(),
            faults: record.faults.iter().cloned().collect(),
            snapshot: snapshot.clone(),
        };
        if let Some(log) = &mut self.log {
            let line = CycleLogLine::new(record, commands, snapshot.clone());
            if let Err(e) = log.write_line(&line) {
                log::error!("run log write failed, disabling: {e}");
                self.log = None;
            }
        }
        self.snapshot.send_replace(snapshot);
        let _ = self.events.send(Arc::new(message));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{Recipe, RecipeOverrides};

    fn fast_config() -> SystemConfig {
        let mut config = SystemConfig::default();
        config.cycle.time_scale = 0.0;
        config
    }

    fn wait_for_cycle(svc: &ControlService, cycle: u64) {
        let deadline = std::time::Instant::now() + std::time::Duration::from_secs(10);
        while svc.snapshot().cycle < cycle {
            assert!(std::time::Instant::now() < deadline, "cycle {cycle} never reached");
            std::thread::sleep(std::time::Duration::from_millis(2));
        }
    }

    #[test]
    fn pause_step_resume() {
        let svc = ControlService::spawn(fast_config()).unwrap();
        svc.submit_blocking(ControlCommand::Pause).unwrap();
        let at = svc.snapshot().cycle;
        let err = svc.submit_blocking(ControlCommand::StepN { n: 0 }).unwrap_err();
        assert_eq!(err.code, ErrorCode::Validation);
        svc.submit_blocking(ControlCommand::StepN { n: 3 }).unwrap();
        wait_for_cycle(&svc, at + 3);
        std::thread::sleep(std::time::Duration::from_millis(50));
        let snap = svc.snapshot();
        assert_eq!(snap.cycle, at + 3);
        assert!(snap.paused);
        svc.submit_blocking(ControlCommand::Resume).unwrap();
        let err = svc.submit_blocking(ControlCommand::StepN { n: 1 }).unwrap_err();
        assert_eq!(err.code, ErrorCode::Conflict);
        svc.shutdown();
    }

    #[test]
    fn start_is_acknowledged_with_the_next_cycle() {
        let mut config = fast_config();
        config.cycle.max_cycles = Some(10);
        let svc = ControlService::spawn(config).unwrap();
        wait_for_cycle(&svc, 10);
        let ack = svc
            .submit_blocking(ControlCommand::StartProcess {
                recipe: Recipe::A,
                params: RecipeOverrides::default(),
            })
            .unwrap();
        assert_eq!(ack.effective_cycle, 10);
        assert_eq!(ack.process, Some(crate::process::ProcessId(1)));
        assert_eq!(svc.snapshot().processes[0].state, "IDLE");
    }

    #[test]
    fn submit_after_shutdown_is_not_ready() {
        let svc = ControlService::spawn(fast_config()).unwrap();
        let requests = svc.requests.clone();
        svc.shutdown();
        let (reply, _rx) = oneshot::channel();
        let req = Request::Command {
            command: ControlCommand::Pause,
            received_at_ms: 0.0,
            reply,
        };
        assert!(requests.send(req).is_err());
    }
}
