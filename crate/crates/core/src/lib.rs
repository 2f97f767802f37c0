//! Cyber-physical component framework for a simulated liqueur plant.
//!
//! The crate is organized bottom-up:
//!
//! * [`plant`]: discrete-time physics of the silos and the shared pipe;
//! * [`scan`]: the READ / EXECUTE / WRITE scan-cycle runtime;
//! * [`component`]: software representatives, silo controllers, ports and
//!   connectors;
//! * [`process`]: common resources, the liqueur batch recipes and the plant
//!   controller coordinating them;
//! * [`codegen`]: IEC 61131-3 object-oriented declaration generator;
//! * [`service`]: configuration, scenarios, run logs and the threaded
//!   control service used by the CLI and HTTP front end.

pub mod codegen;
pub mod component;
pub mod events;
pub mod plant;
pub mod process;
pub mod scan;
pub mod service;
