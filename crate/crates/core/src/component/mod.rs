//! Cyber-physical component building blocks: software representatives,
//! silo controllers, typed ports and the connectors binding them.

mod command;
mod controller;
mod cpc;
mod interface;
mod port;
mod sr;

pub use command::{Callback, CallbackKind, Command, CommandKind, CommandRejection};
pub use controller::{slices_for, SiloController};
pub use cpc::SiloCpc;
pub use interface::{DuplicateOperation, InterfaceSpec, OperationSig, Param, SiloInterfaces, SiloKind};
pub use port::{connect, ConnectError, Connector, Inbox, Port};
pub use sr::{Capabilities, MissingActuator, SiloSr, SrMetadata};
