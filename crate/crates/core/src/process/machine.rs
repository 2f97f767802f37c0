use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::recipe::{Recipe, RecipeConfig, Stage};
use super::resource::{Acquire, ProcessId, ResourceKind, Resources};
use crate::component::{slices_for, CallbackKind, Command, CommandKind, Inbox, Port};
use crate::events::Event;
use crate::plant::SiloId;
use crate::scan::ExecContext;

/// Where a process is in its recipe. Stage indices refer to
/// [`Recipe::stages`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "at", content = "stage", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Position {
    Idle,
    /// Queued for the resource the stage needs.
    Waiting(usize),
    Active(usize),
    Done,
    Aborted,
}

impl Position {
    pub fn is_terminal(self) -> bool {
        matches!(self, Position::Done | Position::Aborted)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcessEvent {
    Start,
    Granted(ResourceKind),
    Completed(CallbackKind, SiloId),
    DwellElapsed,
    Abort,
}

fn enter(stages: &[Stage], repeat: bool, index: usize) -> Position {
    let index = if index < stages.len() {
        index
    } else if repeat && !stages.is_empty() {
        0
    } else {
        return Position::Done;
    };
    match stages[index].resource() {
        Some(_) => Position::Waiting(index),
        None => Position::Active(index),
    }
}

fn completes(stage: Stage, kind: CallbackKind, silo: SiloId) -> bool {
    use CallbackKind::*;
    match stage {
        Stage::Fill(s) => kind == FillingCompleted && silo == s,
        Stage::Heat(s) => kind == HeatingCompleted && silo == s,
        Stage::Mix(s) => kind == MixingCompleted && silo == s,
        Stage::Empty(s) => kind == PouringCompleted && silo == s,
        // Whichever side finishes first ends the transfer.
        Stage::Transfer { from, to } => {
            (kind == PouringCompleted && silo == from) || (kind == FillingCompleted && silo == to)
        }
        Stage::Dwell(_) => false,
    }
}

/// The recipe state machine. `None` means the event is ignored in `pos`.
pub fn transition(
    stages: &[Stage],
    repeat: bool,
    pos: Position,
    event: &ProcessEvent,
) -> Option<Position> {
    match (pos, *event) {
        (Position::Done | Position::Aborted, _) => None,
        (_, ProcessEvent::Abort) => Some(Position::Aborted),
        (Position::Idle, ProcessEvent::Start) => Some(enter(stages, repeat, 0)),
        (Position::Waiting(i), ProcessEvent::Granted(r)) if stages[i].resource() == Some(r) => {
            Some(Position::Active(i))
        }
        (Position::Active(i), ProcessEvent::Completed(kind, silo))
            if completes(stages[i], kind, silo) =>
        {
            Some(enter(stages, repeat, i + 1))
        }
        (Position::Active(i), ProcessEvent::DwellElapsed)
            if matches!(stages[i], Stage::Dwell(_)) =>
        {
            Some(enter(stages, repeat, i + 1))
        }
        _ => None,
    }
}

/// Display name of a position, e.g. `WAIT_PIPE` or `MIXING_S4`.
pub fn position_name(stages: &[Stage], pos: Position) -> String {
    match pos {
        Position::Idle => "IDLE".into(),
        Position::Waiting(i) => match stages[i].resource() {
            Some(r) => format!("WAIT_{r}"),
            None => "WAIT".into(),
        },
        Position::Active(i) => stages[i].state_name(),
        Position::Done => "DONE".into(),
        Position::Aborted => "ABORTED".into(),
    }
}

/// One running instance of a recipe, bound to its silos' process ports.
#[derive(Debug)]
pub struct ProcessMachine {
    id: ProcessId,
    recipe: Recipe,
    config: RecipeConfig,
    stages: Vec<Stage>,
    position: Position,
    held: BTreeSet<ResourceKind>,
    ports: BTreeMap<SiloId, Rc<Port>>,
    inbox: Inbox,
    /// Silos with an issued command that has not called back yet.
    outstanding: BTreeSet<SiloId>,
    dwell_left: u64,
    batches: u32,
}

impl ProcessMachine {
    pub(crate) fn new(
        id: ProcessId,
        recipe: Recipe,
        config: RecipeConfig,
        ports: BTreeMap<SiloId, Rc<Port>>,
        inbox: Inbox,
    ) -> Self {
        ProcessMachine {
            id,
            recipe,
            config,
            stages: recipe.stages(),
            position: Position::Idle,
            held: BTreeSet::new(),
            ports,
            inbox,
            outstanding: BTreeSet::new(),
            dwell_left: 0,
            batches: 0,
        }
    }

    pub fn id(&self) -> ProcessId {
        self.id
    }

    pub fn recipe(&self) -> Recipe {
        self.recipe
    }

    pub fn config(&self) -> &RecipeConfig {
        &self.config
    }

    pub fn position(&self) -> Position {
        self.position
    }

    pub fn state_name(&self) -> String {
        position_name(&self.stages, self.position)
    }

    pub fn held_resources(&self) -> impl Iterator<Item = ResourceKind> + '_ {
        self.held.iter().copied()
    }

    pub fn is_terminal(&self) -> bool {
        self.position.is_terminal()
    }

    /// Batches run to the end of the recipe.
    pub fn batches_completed(&self) -> u32 {
        self.batches
    }

    pub fn silos(&self) -> impl Iterator<Item = SiloId> + '_ {
        self.ports.keys().copied()
    }

    pub fn start(&mut self, ctx: &mut ExecContext<'_>, res: &mut Resources) {
        self.handle(ctx, res, ProcessEvent::Start);
    }

    pub fn abort(&mut self, ctx: &mut ExecContext<'_>, res: &mut Resources) {
        self.handle(ctx, res, ProcessEvent::Abort);
    }

    /// One execute slice: pick up a handed-over resource, advance a dwell,
    /// then react to callbacks received since the last slice.
    pub fn execute(&mut self, ctx: &mut ExecContext<'_>, res: &mut Resources) {
        if let Position::Waiting(i) = self.position {
            if let Some(kind) = self.stages[i].resource() {
                if res.get(kind).holder() == Some(self.id) {
                    self.held.insert(kind);
                    self.handle(ctx, res, ProcessEvent::Granted(kind));
                }
            }
        }
        if let Position::Active(i) = self.position {
            if matches!(self.stages[i], Stage::Dwell(_)) {
                self.dwell_left = self.dwell_left.saturating_sub(1);
                if self.dwell_left == 0 {
                    self.handle(ctx, res, ProcessEvent::DwellElapsed);
                }
            }
        }
        let callbacks: Vec<_> = self.inbox.borrow_mut().drain(..).collect();
        for cb in &callbacks {
            self.outstanding.remove(&cb.silo);
        }
        for cb in callbacks {
            self.handle(ctx, res, ProcessEvent::Completed(cb.kind, cb.silo));
        }
    }

    fn handle(&mut self, ctx: &mut ExecContext<'_>, res: &mut Resources, event: ProcessEvent) {
        let from = self.position;
        let Some(to) = transition(&self.stages, self.config.repeat, from, &event) else {
            return;
        };
        self.leave(ctx, res, from, to, &event);
        self.position = to;
        ctx.emit(Event::Transition {
            process: self.id,
            recipe: self.recipe,
            from: position_name(&self.stages, from),
            to: position_name(&self.stages, to),
        });
        self.arrive(ctx, res, to);
    }

    fn leave(
        &mut self,
        ctx: &mut ExecContext<'_>,
        res: &mut Resources,
        from: Position,
        to: Position,
        event: &ProcessEvent,
    ) {
        if to == Position::Aborted {
            for silo in std::mem::take(&mut self.outstanding) {
                self.cancel(ctx, silo);
            }
            for kind in [ResourceKind::Pipe, ResourceKind::Power] {
                if res.get(kind).holder() == Some(self.id) {
                    self.release(ctx, res, kind);
                } else {
                    res.get_mut(kind).withdraw(self.id);
                }
            }
            return;
        }
        let Position::Active(i) = from else {
            return;
        };
        if let (Stage::Transfer { from: src, to: dst }, ProcessEvent::Completed(kind, _)) =
            (self.stages[i], event)
        {
            if *kind == CallbackKind::FillingCompleted && self.outstanding.contains(&src) {
                ctx.emit(Event::Warning {
                    process: self.id,
                    message: format!("{dst} full before {src} emptied; liquid left in {src}"),
                });
            }
            for silo in std::mem::take(&mut self.outstanding) {
                self.cancel(ctx, silo);
            }
        }
        if let Some(kind) = self.stages[i].resource() {
            if self.held.contains(&kind) {
                self.release(ctx, res, kind);
            }
        }
        if i + 1 == self.stages.len() {
            self.batches += 1;
        }
    }

    fn arrive(&mut self, ctx: &mut ExecContext<'_>, res: &mut Resources, to: Position) {
        match to {
            Position::Waiting(i) => {
                let Some(kind) = self.stages[i].resource() else {
                    return;
                };
                ctx.emit(Event::ResourceRequested {
                    resource: kind,
                    process: self.id,
                });
                let granted = match res.get_mut(kind).acquire(self.id) {
                    Ok(Acquire::Granted) => true,
                    Ok(Acquire::Queued { .. }) => false,
                    Err(_) => res.get(kind).holder() == Some(self.id),
                };
                if granted {
                    ctx.emit(Event::ResourceGranted {
                        resource: kind,
                        process: self.id,
                    });
                    self.held.insert(kind);
                    self.handle(ctx, res, ProcessEvent::Granted(kind));
                }
            }
            Position::Active(i) => {
                let stage = self.stages[i];
                if matches!(stage, Stage::Dwell(_)) {
                    self.dwell_left = slices_for(self.config.dwell_s1, ctx.period());
                    if self.dwell_left == 0 {
                        self.handle(ctx, res, ProcessEvent::DwellElapsed);
                    }
                    return;
                }
                for (silo, kind) in stage.commands(&self.config) {
                    if !self.issue(ctx, silo, kind) {
                        self.handle(ctx, res, ProcessEvent::Abort);
                        return;
                    }
                }
            }
            Position::Idle | Position::Done | Position::Aborted => {}
        }
    }

    fn issue(&mut self, ctx: &mut ExecContext<'_>, silo: SiloId, kind: CommandKind) -> bool {
        let result = match self.ports.get(&silo) {
            Some(port) => port.request(Command::new(kind, ctx.cycle())),
            None => Err(crate::component::CommandRejection::NotConnected),
        };
        match result {
            Ok(()) => {
                self.outstanding.insert(silo);
                ctx.emit(Event::CommandIssued {
                    process: self.id,
                    silo,
                    command: kind,
                });
                true
            }
            Err(rejection) => {
                ctx.emit(Event::CommandRejected {
                    process: self.id,
                    silo,
                    command: kind,
                    rejection,
                });
                false
            }
        }
    }

    fn cancel(&mut self, ctx: &mut ExecContext<'_>, silo: SiloId) {
        if let Some(port) = self.ports.get(&silo) {
            if port.request(Command::new(CommandKind::Cancel, ctx.cycle())).is_ok() {
                ctx.emit(Event::Cancelled {
                    process: self.id,
                    silo,
                });
            }
        }
    }

    fn release(&mut self, ctx: &mut ExecContext<'_>, res: &mut Resources, kind: ResourceKind) {
        self.held.remove(&kind);
        if let Ok(next) = res.get_mut(kind).release(self.id) {
            ctx.emit(Event::ResourceReleased {
                resource: kind,
                process: self.id,
            });
            if let Some(next) = next {
                ctx.emit(Event::ResourceGranted {
                    resource: kind,
                    process: next,
                });
            }
        }
    }
}
