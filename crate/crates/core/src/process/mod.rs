//! Recipe processes, the shared PIPE/POWER resources and the plant
//! controller that wires processes to silos.

mod machine;
mod plant_controller;
mod recipe;
mod resource;

pub use machine::{position_name, transition, Position, ProcessEvent, ProcessMachine};
pub use plant_controller::{AbortError, PlantController, StartError};
pub use recipe::{Recipe, RecipeConfig, RecipeDefaults, RecipeOverrides, Stage};
pub use resource::{Acquire, CommonResource, ProcessId, ResourceError, ResourceKind, Resources};
