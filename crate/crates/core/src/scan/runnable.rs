use std::cell::RefCell;
use std::rc::Rc;
use std::time::Duration;

use thiserror::Error;

use crate::events::Event;

/// Error returned by a component's execute slice. The runtime records it as
/// a fault and carries on with the cycle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct ComponentError(pub String);

/// Per-cycle view handed to each component during EXECUTE.
pub struct ExecContext<'a> {
    cycle: u64,
    period: Duration,
    events: &'a mut Vec<Event>,
}

impl<'a> ExecContext<'a> {
    pub fn new(cycle: u64, period: Duration, events: &'a mut Vec<Event>) -> Self {
        ExecContext {
            cycle,
            period,
            events,
        }
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn period(&self) -> Duration {
        self.period
    }

    pub fn emit(&mut self, event: Event) {
        self.events.push(event);
    }
}

/// A component scheduled by the scan runtime once per cycle.
pub trait Runnable {
    fn name(&self) -> String;

    fn execute(&mut self, ctx: &mut ExecContext<'_>) -> Result<(), ComponentError>;
}

impl<T: Runnable + ?Sized> Runnable for Rc<RefCell<T>> {
    fn name(&self) -> String {
        self.borrow().name()
    }

    fn execute(&mut self, ctx: &mut ExecContext<'_>) -> Result<(), ComponentError> {
        self.borrow_mut().execute(ctx)
    }
}

impl<T: Runnable + ?Sized> Runnable for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn execute(&mut self, ctx: &mut ExecContext<'_>) -> Result<(), ComponentError> {
        (**self).execute(ctx)
    }
}
