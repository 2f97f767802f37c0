use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use thiserror::Error;

use super::machine::ProcessMachine;
use super::recipe::{Recipe, RecipeDefaults, RecipeOverrides};
use super::resource::{ProcessId, Resources};
use crate::component::{connect, Connector, Inbox, Port, SiloCpc, SiloInterfaces};
use crate::plant::SiloId;
use crate::scan::{ComponentError, ExecContext, Runnable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StartError {
    #[error("silos already claimed: {0:?}")]
    SilosBusy(Vec<SiloId>),
    #[error("{0}")]
    Validation(String),
}

impl StartError {
    pub fn code(&self) -> &'static str {
        match self {
            StartError::SilosBusy(_) => "SILOS_BUSY",
            StartError::Validation(_) => "VALIDATION",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AbortError {
    #[error("unknown process {0}")]
    UnknownProcess(ProcessId),
    #[error("process {0} already finished")]
    AlreadyDone(ProcessId),
}

impl AbortError {
    pub fn code(&self) -> &'static str {
        match self {
            AbortError::UnknownProcess(_) => "UNKNOWN_PROCESS",
            AbortError::AlreadyDone(_) => "ALREADY_DONE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Intent {
    Start(ProcessId),
    Abort(ProcessId),
}

#[derive(Debug)]
struct Entry {
    machine: ProcessMachine,
    connectors: Vec<Connector>,
}

/// Owns the process instances, the shared resources and the wiring between
/// processes and silo CPCs.
///
/// Starting or aborting only records an intent; it takes effect in the
/// controller's next execute slice. Silos are claimed from start until the
/// process is done or aborted.
#[derive(Debug)]
pub struct PlantController {
    silos: BTreeMap<SiloId, SiloCpc>,
    defaults: RecipeDefaults,
    entries: BTreeMap<ProcessId, Entry>,
    resources: Resources,
    intents: Vec<Intent>,
    next_id: u32,
}

impl PlantController {
    pub fn new(silos: impl IntoIterator<Item = SiloCpc>, defaults: RecipeDefaults) -> Self {
        PlantController {
            silos: silos.into_iter().map(|c| (c.silo(), c)).collect(),
            defaults,
            entries: BTreeMap::new(),
            resources: Resources::default(),
            intents: Vec::new(),
            next_id: 1,
        }
    }

    pub fn defaults(&self) -> &RecipeDefaults {
        &self.defaults
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn cpc(&self, silo: SiloId) -> Option<&SiloCpc> {
        self.silos.get(&silo)
    }

    pub fn processes(&self) -> impl Iterator<Item = &ProcessMachine> {
        self.entries.values().map(|e| &e.machine)
    }

    pub fn process(&self, id: ProcessId) -> Option<&ProcessMachine> {
        self.entries.get(&id).map(|e| &e.machine)
    }

    /// Silos bound to a live process.
    pub fn claimed_silos(&self) -> BTreeSet<SiloId> {
        self.entries
            .values()
            .filter(|e| !e.machine.is_terminal())
            .flat_map(|e| e.machine.silos())
            .collect()
    }

    pub fn has_pending_intents(&self) -> bool {
        !self.intents.is_empty()
    }

    pub fn start_process(
        &mut self,
        recipe: Recipe,
        overrides: &RecipeOverrides,
    ) -> Result<ProcessId, StartError> {
        let config = self.defaults.get(recipe).with_overrides(overrides);
        config.validate().map_err(StartError::Validation)?;
        let wanted = recipe.silos();
        for silo in wanted {
            let cpc = self
                .silos
                .get(&silo)
                .ok_or_else(|| StartError::Validation(format!("plant has no silo {silo}")))?;
            let service = SiloInterfaces::for_kind(cpc.kind()).service;
            let caps = cpc.sr().borrow().capabilities();
            for stage in recipe.stages() {
                for (s, kind) in stage.commands(&config) {
                    if s != silo {
                        continue;
                    }
                    let op = kind.operation();
                    let heat_ok = !matches!(kind, crate::component::CommandKind::HeatToTemp { .. })
                        || caps.temp_sensor;
                    if !service.has_operation(op) || !heat_ok {
                        return Err(StartError::Validation(format!(
                            "recipe {recipe} needs `{op}` on {silo}, which is a {}",
                            cpc.kind().name()
                        )));
                    }
                }
            }
        }
        let claimed = self.claimed_silos();
        let busy: Vec<_> = wanted.iter().copied().filter(|s| claimed.contains(s)).collect();
        if !busy.is_empty() {
            return Err(StartError::SilosBusy(busy));
        }

        let id = ProcessId(self.next_id);
        let inbox = Inbox::default();
        let mut ports = BTreeMap::new();
        let mut connectors = Vec::new();
        for silo in wanted {
            let cpc = &self.silos[&silo];
            let ifs = SiloInterfaces::for_kind(cpc.kind());
            let port = Port::with_inbox(
                format!("genLiqueur{recipe}#{}.its{silo}", id.0),
                ifs.callbacks,
                ifs.service,
                Rc::clone(&inbox),
            );
            match connect(&port, &cpc.process_port()) {
                Ok(c) => connectors.push(c),
                Err(_) => {
                    connectors.into_iter().for_each(Connector::disconnect);
                    return Err(StartError::SilosBusy(vec![silo]));
                }
            }
            ports.insert(silo, port);
        }
        self.next_id += 1;
        let machine = ProcessMachine::new(id, recipe, config, ports, inbox);
        self.entries.insert(id, Entry { machine, connectors });
        self.intents.push(Intent::Start(id));
        Ok(id)
    }

    pub fn abort_process(&mut self, id: ProcessId) -> Result<(), AbortError> {
        let entry = self.entries.get(&id).ok_or(AbortError::UnknownProcess(id))?;
        if entry.machine.is_terminal() {
            return Err(AbortError::AlreadyDone(id));
        }
        if !self.intents.contains(&Intent::Abort(id)) {
            self.intents.push(Intent::Abort(id));
        }
        Ok(())
    }
}

impl Runnable for PlantController {
    fn name(&self) -> String {
        "PlantController".into()
    }

    fn execute(&mut self, ctx: &mut ExecContext<'_>) -> Result<(), ComponentError> {
        for intent in std::mem::take(&mut self.intents) {
            let (Intent::Start(id) | Intent::Abort(id)) = intent;
            let Some(entry) = self.entries.get_mut(&id) else {
                continue;
            };
            match intent {
                Intent::Start(_) => entry.machine.start(ctx, &mut self.resources),
                Intent::Abort(_) => entry.machine.abort(ctx, &mut self.resources),
            }
        }
        for entry in self.entries.values_mut() {
            if !entry.machine.is_terminal() {
                entry.machine.execute(ctx, &mut self.resources);
            }
        }
        for entry in self.entries.values_mut() {
            if entry.machine.is_terminal() {
                std::mem::take(&mut entry.connectors)
                    .into_iter()
                    .for_each(Connector::disconnect);
            }
        }
        Ok(())
    }
}
