//! Physics of the four-silo plant: levels, temperatures and mixing driven by
//! the actuator image, observed through the sensor image.
//!
//! Everything here is a pure function over value types. A single shared pipe
//! connects an upstream supply inlet, the silos, and a downstream product
//! outlet:
//!
//! * open IN valves with no open OUT valve draw raw liquid from the supply;
//! * open OUT valves with no open IN valve drain to the product outlet;
//! * exactly one OUT and one IN transfer silo to silo at the slower of the
//!   two rates;
//! * more than one source or destination during a transfer blocks the pipe
//!   and is reported as a fault.

mod config;
mod image;
mod sim;

pub use config::{ConfigError, ParseSiloIdError, PlantConfig, SiloId, SiloSpec};
pub use image::{
    Actuator, ActuatorImage, Fault, FaultSet, SensorImage, SiloActuators, SiloSensors, SiloState,
};
pub use sim::{Flow, Plant, StepOutcome};
