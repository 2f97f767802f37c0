use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a process instance, unique within a plant controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProcessId(pub u32);

impl fmt::Display for ProcessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResourceKind {
    Pipe,
    Power,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceKind::Pipe => "PIPE",
            ResourceKind::Power => "POWER",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acquire {
    Granted,
    /// One-based position in the wait queue.
    Queued { position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ResourceError {
    #[error("client already holds or waits for the resource")]
    DuplicateRequest,
    #[error("client is not the holder")]
    NotHolder,
}

impl ResourceError {
    pub fn code(&self) -> &'static str {
        match self {
            ResourceError::DuplicateRequest => "DUPLICATE_REQUEST",
            ResourceError::NotHolder => "NOT_HOLDER",
        }
    }
}

/// Exclusive resource with a FIFO wait queue. Releasing hands the resource
/// straight to the head of the queue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonResource {
    kind: ResourceKind,
    holder: Option<ProcessId>,
    queue: VecDeque<ProcessId>,
}

impl CommonResource {
    pub fn new(kind: ResourceKind) -> Self {
        CommonResource {
            kind,
            holder: None,
            queue: VecDeque::new(),
        }
    }

    pub fn kind(&self) -> ResourceKind {
        self.kind
    }

    pub fn holder(&self) -> Option<ProcessId> {
        self.holder
    }

    pub fn queue(&self) -> impl Iterator<Item = ProcessId> + '_ {
        self.queue.iter().copied()
    }

    pub fn acquire(&mut self, client: ProcessId) -> Result<Acquire, ResourceError> {
        if self.holder == Some(client) || self.queue.contains(&client) {
            return Err(ResourceError::DuplicateRequest);
        }
        if self.holder.is_none() {
            self.holder = Some(client);
            Ok(Acquire::Granted)
        } else {
            self.queue.push_back(client);
            Ok(Acquire::Queued {
                position: self.queue.len(),
            })
        }
    }

    /// Returns the new holder, if the queue was not empty.
    pub fn release(&mut self, client: ProcessId) -> Result<Option<ProcessId>, ResourceError> {
        if self.holder != Some(client) {
            return Err(ResourceError::NotHolder);
        }
        self.holder = self.queue.pop_front();
        Ok(self.holder)
    }

    /// Drops `client` from the queue if it is waiting. Returns whether it was.
    pub fn withdraw(&mut self, client: ProcessId) -> bool {
        let before = self.queue.len();
        self.queue.retain(|&c| c != client);
        self.queue.len() != before
    }
}

/// The plant's shared resources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resources {
    pub pipe: CommonResource,
    pub power: CommonResource,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            pipe: CommonResource::new(ResourceKind::Pipe),
            power: CommonResource::new(ResourceKind::Power),
        }
    }
}

impl Resources {
    pub fn get(&self, kind: ResourceKind) -> &CommonResource {
        match kind {
            ResourceKind::Pipe => &self.pipe,
            ResourceKind::Power => &self.power,
        }
    }

    pub fn get_mut(&mut self, kind: ResourceKind) -> &mut CommonResource {
        match kind {
            ResourceKind::Pipe => &mut self.pipe,
            ResourceKind::Power => &mut self.power,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &CommonResource> {
        [&self.pipe, &self.power].into_iter()
    }
}
