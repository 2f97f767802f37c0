//! Headless runs and the invariant checks applied to their logs.

use std::collections::{BTreeMap, VecDeque};

use liqueur_plant::component::CommandKind;
use liqueur_plant::events::Event;
use liqueur_plant::plant::{Fault, SiloId};
use liqueur_plant::process::{ProcessId, Recipe, ResourceKind};
use liqueur_plant::service::{
    run_headless, ControlCommand, CycleLogLine, LiqueurPlant, Scenario, ScenarioEntry,
    StopCondition, SystemConfig,
};

pub fn headless_config() -> SystemConfig {
    let mut config = SystemConfig::default();
    config.cycle.time_scale = 0.0;
    config
}

pub fn start(cycle: u64, recipe: Recipe) -> ScenarioEntry {
    ScenarioEntry {
        cycle,
        command: ControlCommand::StartProcess {
            recipe,
            params: Default::default(),
        },
    }
}

pub struct Run {
    pub lines: Vec<CycleLogLine>,
    pub plant: LiqueurPlant,
}

impl Run {
    pub fn events(&self) -> impl Iterator<Item = (u64, &Event)> {
        self.lines
            .iter()
            .flat_map(|l| l.events.iter().map(move |e| (l.cycle, e)))
    }

    /// `(cycle, to)` of every transition of `process`.
    pub fn transitions(&self, process: ProcessId) -> Vec<(u64, String)> {
        self.events()
            .filter_map(|(c, e)| match e {
                Event::Transition { process: p, to, .. } if *p == process => Some((c, to.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn all_done(&self) -> bool {
        let snap = self.plant.snapshot();
        !snap.processes.is_empty() && snap.processes.iter().all(|p| p.state == "DONE")
    }
}

pub fn run(config: &SystemConfig, entries: Vec<ScenarioEntry>, max_cycles: u64) -> Run {
    let mut plant = LiqueurPlant::new(config).expect("valid config");
    let mut lines = Vec::new();
    let stop = StopCondition { max_cycles, until_idle: true };
    run_headless(&mut plant, &Scenario::new(entries), stop, |l| {
        lines.push(l.clone());
        Ok::<_, std::convert::Infallible>(())
    })
    .unwrap();
    Run { lines, plant }
}

fn recipe_silos(recipe: Recipe) -> [SiloId; 2] {
    match recipe {
        Recipe::A => [SiloId::S1, SiloId::S4],
        Recipe::B => [SiloId::S2, SiloId::S3],
    }
}

/// At most one source and one destination on the pipe per cycle, every
/// open valve on a silo of the PIPE holder, no multi-source/dest fault.
pub fn check_pipe_exclusive(run: &Run) -> Result<(), String> {
    for line in &run.lines {
        let c = line.cycle;
        let open: Vec<(SiloId, bool, bool)> = line
            .actuators
            .iter()
            .filter(|(_, a)| a.in_valve || a.out_valve)
            .map(|(s, a)| (s, a.in_valve, a.out_valve))
            .collect();
        if open.iter().filter(|o| o.1).count() > 1 || open.iter().filter(|o| o.2).count() > 1 {
            return Err(format!("cycle {c}: more than one transfer pair {open:?}"));
        }
        if line
            .faults
            .iter()
            .any(|f| matches!(f, Fault::PipeMultiSource | Fault::PipeMultiDest))
        {
            return Err(format!("cycle {c}: pipe fault"));
        }
        if open.is_empty() {
            continue;
        }
        let holder = line
            .snapshot
            .resources
            .iter()
            .find(|r| r.kind == ResourceKind::Pipe)
            .and_then(|r| r.holder)
            .ok_or_else(|| format!("cycle {c}: valves {open:?} open with the pipe free"))?;
        let recipe = line.snapshot.process(holder).expect("holder is known").recipe;
        if let Some(o) = open.iter().find(|o| !recipe_silos(recipe).contains(&o.0)) {
            return Err(format!("cycle {c}: {} open but {holder} holds the pipe", o.0));
        }
    }
    Ok(())
}

pub fn check_power_exclusive(run: &Run) -> Result<(), String> {
    for line in &run.lines {
        if line.actuators.silo(SiloId::S3).mixer && line.actuators.silo(SiloId::S4).mixer {
            return Err(format!("cycle {}: M3 and M4 both on", line.cycle));
        }
    }
    Ok(())
}

/// Grants go to the longest-waiting requester, per resource.
pub fn check_fifo(run: &Run) -> Result<(), String> {
    let mut waiting: BTreeMap<ResourceKind, VecDeque<ProcessId>> = BTreeMap::new();
    for (c, event) in run.events() {
        match event {
            Event::ResourceRequested { resource, process } => {
                waiting.entry(*resource).or_default().push_back(*process)
            }
            Event::ResourceGranted { resource, process } => {
                let queue = waiting.entry(*resource).or_default();
                if queue.front() != Some(process) {
                    return Err(format!(
                        "cycle {c}: {resource:?} granted to {process}, waiting {queue:?}"
                    ));
                }
                queue.pop_front();
            }
            _ => {}
        }
    }
    Ok(())
}

/// Per silo and process, commands that were not cancelled map one to one,
/// in order, to callbacks of the matching kind; cancelled ones get none.
pub fn check_callback_bijection(run: &Run) -> Result<usize, String> {
    let mut open: BTreeMap<SiloId, VecDeque<CommandKind>> = BTreeMap::new();
    let mut matched = 0;
    for (c, event) in run.events() {
        match event {
            Event::CommandIssued { silo, command, .. } => {
                let pending = open.entry(*silo).or_default();
                if !pending.is_empty() {
                    return Err(format!("cycle {c}: {silo} got {command} while busy"));
                }
                pending.push_back(*command);
            }
            Event::Cancelled { silo, .. } => {
                open.entry(*silo).or_default().clear();
            }
            Event::Callback { silo, kind } => {
                let issued = open
                    .entry(*silo)
                    .or_default()
                    .pop_front()
                    .ok_or_else(|| format!("cycle {c}: {kind:?} from {silo} without a command"))?;
                if issued.completion() != Some(*kind) {
                    return Err(format!("cycle {c}: {silo} answered {issued} with {kind:?}"));
                }
                matched += 1;
            }
            _ => {}
        }
    }
    if let Some((silo, left)) = open.iter().find(|(_, q)| !q.is_empty()) {
        return Err(format!("{silo}: {left:?} never completed"));
    }
    let completed: u64 = run
        .plant
        .cpcs()
        .iter()
        .map(|cpc| cpc.controller().borrow().completed_count())
        .sum();
    if completed != matched as u64 {
        return Err(format!("controllers count {completed} completions, log has {matched}"));
    }
    Ok(matched)
}
