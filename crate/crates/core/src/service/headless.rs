use super::runlog::{AppliedCommand, CycleLogLine};
use super::scenario::Scenario;
use super::snapshot::PlantSnapshot;
use super::system::LiqueurPlant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopCondition {
    pub max_cycles: u64,
    /// Stop early once every process has finished and the scenario is
    /// exhausted.
    pub until_idle: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadlessSummary {
    pub cycles_run: u64,
    pub rejected_commands: usize,
    pub final_snapshot: PlantSnapshot,
}

/// Runs `plant` against a scenario, handing every log line to `sink`.
///
/// Commands scheduled for cycle `c` are applied in the gap just before
/// cycle `c` runs; commands for cycles already past are applied at once.
pub fn run_headless<E>(
    plant: &mut LiqueurPlant,
    scenario: &Scenario,
    stop: StopCondition,
    mut sink: impl FnMut(&CycleLogLine) -> Result<(), E>,
) -> Result<HeadlessSummary, E> {
    let mut pending = scenario.commands.iter().peekable();
    let mut cycles_run = 0;
    let mut rejected = 0;
    while cycles_run < stop.max_cycles {
        let cycle = plant.next_cycle();
        let mut applied = Vec::new();
        while let Some(entry) = pending.next_if(|e| e.cycle <= cycle) {
            let result = plant.apply(&entry.command);
            if let Err(err) = &result {
                log::info!("cycle {cycle}: {} rejected: {err}", entry.command.name());
                rejected += 1;
            }
            applied.push(AppliedCommand {
                command: entry.command.clone(),
                received_at_ms: None,
                outcome: (&result).into(),
            });
        }
        let record = plant.run_cycle();
        cycles_run += 1;
        sink(&CycleLogLine::new(record, applied, plant.snapshot()))?;
        if stop.until_idle && pending.peek().is_none() && plant.is_idle() {
            break;
        }
    }
    Ok(HeadlessSummary {
        cycles_run,
        rejected_commands: rejected,
        final_snapshot: plant.snapshot(),
    })
}
