//! Scan-cycle execution: READ the sensor image into every SR, EXECUTE each
//! registered component once in ascending order key, then WRITE the latched
//! actuator image into the plant and advance it by one period.

mod pacer;
mod runnable;
mod runtime;

pub use pacer::Pacer;
pub use runnable::{ComponentError, ExecContext, Runnable};
pub use runtime::{
    CycleConfig, CycleObserver, CycleRecord, RegistrationHandle, RunUntil, RuntimeError,
    ScanRuntime,
};
