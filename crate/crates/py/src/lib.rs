//! Python bindings. Structured values cross the boundary as plain
//! dicts and lists, through their JSON form.

use liqueur_plant::codegen::{self, plant_model, CodegenError as CoreCodegenError};
use liqueur_plant::plant::{Actuator, SiloId};
use liqueur_plant::process::{ProcessId, Recipe, RecipeOverrides};
use liqueur_plant::service::{
    run_headless, AppliedCommand, ControlCommand, ControlError as CoreControlError, CycleLogLine,
    LiqueurPlant, Scenario, StopCondition, SystemConfig,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(liqueur_plant_py, ControlError, PyException, "A refused operator command; args are (code, message).");
create_exception!(liqueur_plant_py, CodegenError, PyException, "An invalid model; args are (code, message, line, path).");

fn control_err(e: CoreControlError) -> PyErr {
    ControlError::new_err((e.code.as_str(), e.message))
}

fn codegen_err(e: CoreCodegenError) -> PyErr {
    CodegenError::new_err((e.code(), e.message, e.location.line, e.location.path))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts a JSON string or any JSON-compatible Python value.
fn from_py<T: DeserializeOwned>(value: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = match value.extract::<String>() {
        Ok(s) => s,
        Err(_) => value
            .py()
            .import("json")?
            .call_method1("dumps", (value,))?
            .extract()?,
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn load_config(config: Option<&Bound<'_, PyAny>>) -> PyResult<SystemConfig> {
    let mut config: SystemConfig = match config {
        Some(c) => from_py(c)?,
        None => SystemConfig::default(),
    };
    config.cycle.time_scale = 0.0;
    config.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(config)
}

fn parse<T: std::str::FromStr>(what: &str, raw: &str) -> PyResult<T> {
    raw.parse()
        .map_err(|_| PyValueError::new_err(format!("unknown {what} `{raw}`")))
}

fn parse_actuator(raw: &str) -> PyResult<Actuator> {
    serde_json::from_value(serde_json::Value::String(raw.into()))
        .map_err(|_| PyValueError::new_err(format!("unknown actuator `{raw}`")))
}

/// The assembled plant, stepped explicitly from Python without pacing.
#[pyclass(unsendable, module = "liqueur_plant_py")]
struct Plant {
    inner: LiqueurPlant,
    pending: Vec<AppliedCommand>,
}

impl Plant {
    fn submit(&mut self, command: ControlCommand) -> Result<liqueur_plant::service::Ack, CoreControlError> {
        let result = self.inner.apply(&command);
        self.pending.push(AppliedCommand {
            command,
            received_at_ms: None,
            outcome: (&result).into(),
        });
        result
    }

    fn cycle(&mut self) -> CycleLogLine {
        let record = self.inner.run_cycle_now();
        let applied = std::mem::take(&mut self.pending);
        CycleLogLine::new(record, applied, self.inner.snapshot())
    }
}

#[pymethods]
impl Plant {
    #[new]
    #[pyo3(signature = (config=None))]
    fn new(config: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let config = load_config(config)?;
        let inner = LiqueurPlant::new(&config).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Plant {
            inner,
            pending: Vec::new(),
        })
    }

    /// Applies a command (`{"kind": ..., "payload": ...}`) before the next
    /// cycle and returns the acknowledgement.
    fn apply<'py>(&mut self, py: Python<'py>, command: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let command: ControlCommand = from_py(command)?;
        let ack = self.submit(command).map_err(control_err)?;
        to_py(py, &ack)
    }

    /// Starts a batch and returns its process id.
    #[pyo3(signature = (recipe, setpoint=None, mix_duration=None, dwell_s1=None, repeat=None))]
    fn start(
        &mut self,
        recipe: &str,
        setpoint: Option<f64>,
        mix_duration: Option<f64>,
        dwell_s1: Option<f64>,
        repeat: Option<bool>,
    ) -> PyResult<u32> {
        let recipe: Recipe = match recipe {
            "A" => Recipe::A,
            "B" => Recipe::B,
            other => return Err(PyValueError::new_err(format!("unknown recipe `{other}`"))),
        };
        let params = RecipeOverrides {
            setpoint,
            mix_duration,
            dwell_s1,
            repeat,
        };
        let ack = self
            .submit(ControlCommand::StartProcess { recipe, params })
            .map_err(control_err)?;
        Ok(ack.process.map(|p| p.0).unwrap_or_default())
    }

    fn abort(&mut self, process: u32) -> PyResult<u64> {
        let ack = self
            .submit(ControlCommand::AbortProcess {
                process: ProcessId(process),
            })
            .map_err(control_err)?;
        Ok(ack.effective_cycle)
    }

    fn set_actuator(&mut self, silo: &str, actuator: &str, value: bool) -> PyResult<u64> {
        let silo: SiloId = parse("silo", silo)?;
        let actuator = parse_actuator(actuator)?;
        let ack = self
            .submit(ControlCommand::ManualActuator {
                silo,
                actuator,
                value,
            })
            .map_err(control_err)?;
        Ok(ack.effective_cycle)
    }

    /// Runs `n` cycles and returns their log lines.
    #[pyo3(signature = (n=1))]
    fn step<'py>(&mut self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        let lines: Vec<CycleLogLine> = (0..n).map(|_| self.cycle()).collect();
        to_py(py, &lines)
    }

    /// Runs until every process has finished; returns the cycles run.
    #[pyo3(signature = (max_cycles=100_000))]
    fn run_until_idle(&mut self, max_cycles: u64) -> u64 {
        let mut run = 0;
        while run < max_cycles {
            self.cycle();
            run += 1;
            if self.inner.is_idle() {
                break;
            }
        }
        run
    }

    fn snapshot<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.snapshot())
    }

    #[getter]
    fn next_cycle(&self) -> u64 {
        self.inner.next_cycle()
    }

    #[getter]
    fn is_idle(&self) -> bool {
        self.inner.is_idle()
    }
}

/// Runs a scenario headless and returns `{"cycles_run", "rejected_commands",
/// "lines"}`. Without `cycles` the run stops once the plant is idle.
#[pyfunction]
#[pyo3(signature = (scenario, config=None, cycles=None))]
fn run_scenario<'py>(
    py: Python<'py>,
    scenario: &Bound<'py, PyAny>,
    config: Option<&Bound<'py, PyAny>>,
    cycles: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let config = load_config(config)?;
    let scenario: Scenario = from_py(scenario)?;
    let scenario = Scenario::new(scenario.commands);
    let mut plant = LiqueurPlant::new(&config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let stop = StopCondition {
        max_cycles: cycles.unwrap_or(1_000_000),
        until_idle: cycles.is_none(),
    };
    let mut lines = Vec::new();
    let summary = run_headless(&mut plant, &scenario, stop, |l| {
        lines.push(l.clone());
        Ok::<_, std::convert::Infallible>(())
    })
    .unwrap_or_else(|e| match e {});
    to_py(
        py,
        &serde_json::json!({
            "cycles_run": summary.cycles_run,
            "rejected_commands": summary.rejected_commands,
            "lines": lines,
        }),
    )
}

/// Structured-text declarations for a JSON or ST model.
#[pyfunction]
fn generate_st(model: &str) -> PyResult<String> {
    let m = codegen::parse_model(model).map_err(codegen_err)?;
    Ok(codegen::emit_st(&m))
}

#[pyfunction]
fn to_st_identifier(name: &str) -> String {
    codegen::to_st_identifier(name)
}

#[pyfunction(name = "plant_model")]
fn py_plant_model(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &plant_model())
}

#[pyfunction]
fn default_config(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &SystemConfig::default())
}

#[pymodule]
fn liqueur_plant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Plant>()?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(generate_st, m)?)?;
    m.add_function(wrap_pyfunction!(to_st_identifier, m)?)?;
    m.add_function(wrap_pyfunction!(py_plant_model, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add("ControlError", m.py().get_type::<ControlError>())?;
    m.add("CodegenError", m.py().get_type::<CodegenError>())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pyo3::types::PyDict;

    fn with_py<R>(f: impl for<'py> FnOnce(Python<'py>) -> R) -> R {
        Python::initialize();
        Python::attach(f)
    }

    #[test]
    fn values_round_trip_through_python_objects() {
        with_py(|py| {
            let config = SystemConfig::default();
            let obj = to_py(py, &config).unwrap();
            assert!(obj.cast::<PyDict>().is_ok());
            let back: SystemConfig = from_py(&obj).unwrap();
            assert_eq!(back, config);
            let from_text: SystemConfig = from_py(&"{}".into_pyobject(py).unwrap().into_any()).unwrap();
            assert_eq!(from_text, config);
        });
    }

    #[test]
    fn refusals_become_control_errors() {
        with_py(|py| {
            let mut plant = Plant::new(None).unwrap();
            plant.start("B", None, None, None, None).unwrap();
            let err = plant.start("B", None, None, None, None).unwrap_err();
            assert!(err.is_instance_of::<ControlError>(py));
            let args = err.value(py).getattr("args").unwrap();
            assert_eq!(args.get_item(0).unwrap().extract::<String>().unwrap(), "SILOS_BUSY");
            assert!(plant.start("C", None, None, None, None).is_err());
            assert!(plant.set_actuator("S1", "valve", true).is_err());
        });
    }

    #[test]
    fn step_reports_applied_commands_once() {
        with_py(|py| {
            let mut plant = Plant::new(None).unwrap();
            plant.set_actuator("S1", "in_valve", true).unwrap();
            let lines = plant.step(py, 2).unwrap();
            assert_eq!(lines.len().unwrap(), 2);
            let first = lines.get_item(0).unwrap().get_item("commands").unwrap();
            let second = lines.get_item(1).unwrap().get_item("commands").unwrap();
            assert_eq!(first.len().unwrap(), 1);
            assert_eq!(second.len().unwrap(), 0);
            assert_eq!(plant.next_cycle(), 2);
        });
    }

    #[test]
    fn codegen_errors_carry_their_kind() {
        with_py(|py| {
            let err = generate_st("FUNCTION_BLOCK A\nx:NOPE;\nEND_FUNCTION_BLOCK\n").unwrap_err();
            assert!(err.is_instance_of::<CodegenError>(py));
            let args = err.value(py).getattr("args").unwrap();
            assert_eq!(
                args.get_item(0).unwrap().extract::<String>().unwrap(),
                "UNRESOLVED_REFERENCE"
            );
        });
    }
}
