use std::cell::RefCell;
use std::fmt;
use std::rc::{Rc, Weak};

use thiserror::Error;

use super::command::{Callback, Command, CommandRejection};
use super::controller::SiloController;
use super::interface::InterfaceSpec;

/// Callbacks delivered to a process port, drained by the process on its next
/// execute slice.
pub type Inbox = Rc<RefCell<Vec<Callback>>>;

/// Where calls arriving at a port are dispatched.
#[derive(Clone)]
pub(crate) enum PortTarget {
    Controller(Weak<RefCell<SiloController>>),
    Inbox(Inbox),
    Detached,
}

/// Typed interaction point: implements `provided` for its owner and calls
/// its peer through `required`.
pub struct Port {
    name: String,
    provided: Rc<InterfaceSpec>,
    required: Rc<InterfaceSpec>,
    target: PortTarget,
    peer: RefCell<Weak<Port>>,
}

impl fmt::Debug for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Port")
            .field("name", &self.name)
            .field("provided", &self.provided.name)
            .field("required", &self.required.name)
            .field("bound", &self.is_bound())
            .finish()
    }
}

impl Port {
    pub(crate) fn with_target(
        name: impl Into<String>,
        provided: Rc<InterfaceSpec>,
        required: Rc<InterfaceSpec>,
        target: PortTarget,
    ) -> Rc<Port> {
        Rc::new(Port {
            name: name.into(),
            provided,
            required,
            target,
            peer: RefCell::new(Weak::new()),
        })
    }

    /// Process-side port whose provided operations land in `inbox`.
    pub fn with_inbox(
        name: impl Into<String>,
        provided: Rc<InterfaceSpec>,
        required: Rc<InterfaceSpec>,
        inbox: Inbox,
    ) -> Rc<Port> {
        Self::with_target(name, provided, required, PortTarget::Inbox(inbox))
    }

    /// A port with no behavior behind it, only a type.
    pub fn detached(
        name: impl Into<String>,
        provided: Rc<InterfaceSpec>,
        required: Rc<InterfaceSpec>,
    ) -> Rc<Port> {
        Self::with_target(name, provided, required, PortTarget::Detached)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provided(&self) -> &InterfaceSpec {
        &self.provided
    }

    pub fn required(&self) -> &InterfaceSpec {
        &self.required
    }

    pub fn is_bound(&self) -> bool {
        self.peer().is_some()
    }

    pub fn peer(&self) -> Option<Rc<Port>> {
        self.peer.borrow().upgrade()
    }

    /// Calls a command operation of the peer through the required interface.
    pub fn request(&self, command: Command) -> Result<(), CommandRejection> {
        let peer = self.peer().ok_or(CommandRejection::NotConnected)?;
        let op = command.kind.operation();
        if !self.required.has_operation(op) {
            return Err(CommandRejection::Unsupported(format!(
                "{} has no operation `{op}`",
                self.required.name
            )));
        }
        match &peer.target {
            PortTarget::Controller(controller) => {
                let controller = controller.upgrade().ok_or(CommandRejection::NotConnected)?;
                let result = controller.borrow_mut().issue_command(command);
                result
            }
            _ => Err(CommandRejection::Unsupported(format!(
                "peer port {} does not accept commands",
                peer.name
            ))),
        }
    }

    /// Delivers a callback to the peer's owner. Returns `false` when unbound
    /// or the peer cannot receive callbacks.
    pub fn notify(&self, callback: Callback) -> bool {
        let Some(peer) = self.peer() else {
            return false;
        };
        if !self.required.has_operation(callback.kind.operation()) {
            return false;
        }
        match &peer.target {
            PortTarget::Inbox(inbox) => {
                inbox.borrow_mut().push(callback);
                true
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectError {
    #[error("incompatible interfaces: {0}")]
    IncompatibleInterfaces(String),
    #[error("port `{0}` is already bound")]
    PortAlreadyBound(String),
}

impl ConnectError {
    pub fn code(&self) -> &'static str {
        match self {
            ConnectError::IncompatibleInterfaces(_) => "INCOMPATIBLE_INTERFACES",
            ConnectError::PortAlreadyBound(_) => "PORT_ALREADY_BOUND",
        }
    }
}

/// A binding between two compliant ports.
#[derive(Debug)]
pub struct Connector {
    a: Rc<Port>,
    b: Rc<Port>,
}

impl Connector {
    pub fn ends(&self) -> (&Rc<Port>, &Rc<Port>) {
        (&self.a, &self.b)
    }

    /// Unbinds both ends.
    pub fn disconnect(self) {
        *self.a.peer.borrow_mut() = Weak::new();
        *self.b.peer.borrow_mut() = Weak::new();
    }
}

/// Binds two unbound ports whose provided/required interfaces cross-match.
pub fn connect(a: &Rc<Port>, b: &Rc<Port>) -> Result<Connector, ConnectError> {
    for port in [a, b] {
        if port.is_bound() {
            return Err(ConnectError::PortAlreadyBound(port.name.clone()));
        }
    }
    if a.required != b.provided {
        return Err(ConnectError::IncompatibleInterfaces(format!(
            "{} requires {} but {} provides {}",
            a.name, a.required.name, b.name, b.provided.name
        )));
    }
    if b.required != a.provided {
        return Err(ConnectError::IncompatibleInterfaces(format!(
            "{} requires {} but {} provides {}",
            b.name, b.required.name, a.name, a.provided.name
        )));
    }
    *a.peer.borrow_mut() = Rc::downgrade(b);
    *b.peer.borrow_mut() = Rc::downgrade(a);
    Ok(Connector {
        a: Rc::clone(a),
        b: Rc::clone(b),
    })
}
