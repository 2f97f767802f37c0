//! Assembly of the full plant and everything around it: configuration,
//! operator commands, snapshots, run logs, scripted headless runs and the
//! threaded control service behind the HTTP front end.

mod command;
mod config;
mod control;
mod headless;
mod runlog;
mod scenario;
mod snapshot;
mod system;

pub use command::{Ack, ControlCommand, ControlError, ErrorCode};
pub use config::{LogConfig, SystemConfig, SystemConfigError};
pub use control::{ControlService, StreamMessage, EVENT_CAPACITY};
pub use headless::{run_headless, HeadlessSummary, StopCondition};
pub use runlog::{strip_timing, AppliedCommand, CommandOutcome, CycleLogLine, RunLog, Timing};
pub use scenario::{Scenario, ScenarioEntry};
pub use snapshot::{PlantSnapshot, ProcessSnapshot, ResourceSnapshot, SiloSnapshot};
pub use system::{controller_order, LiqueurPlant, ManualPanel, MANUAL_PANEL_ORDER, PLANT_CONTROLLER_ORDER};
