//! Front ends for the liqueur plant: the HTTP/WebSocket server, scripted
//! headless runs and the structured-text generator.

pub mod http;

use std::fs::File;
use std::future::Future;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use liqueur_plant::codegen::{emit_st, parse_model, CodegenError, ErrorKind};
use liqueur_plant::service::{
    run_headless, ControlService, HeadlessSummary, LiqueurPlant, RunLog, Scenario, StopCondition,
    SystemConfig,
};
use serde_json::json;
use tokio::net::TcpListener;

/// Cycle cap for headless runs that stop once idle.
pub const IDLE_RUN_CAP: u64 = 1_000_000;

/// Serves the API on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    service: Arc<ControlService>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, http::router(service))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Runs a scenario as fast as possible. Without `cycles` the run stops once
/// the scenario is exhausted and every process has finished.
pub fn run_scenario(
    mut config: SystemConfig,
    scenario: &Scenario,
    cycles: Option<u64>,
    log: Option<&Path>,
) -> anyhow::Result<HeadlessSummary> {
    config.cycle.time_scale = 0.0;
    let mut plant = LiqueurPlant::new(&config).context("building the plant")?;
    let stop = match cycles {
        Some(max_cycles) => StopCondition {
            max_cycles,
            until_idle: false,
        },
        None => StopCondition {
            max_cycles: IDLE_RUN_CAP,
            until_idle: true,
        },
    };
    let log_path = log.map(Path::to_path_buf).or_else(|| config.log.path.clone());
    let summary = match log_path {
        Some(path) => {
            let mut out = RunLog::create(&path, config.log.max_bytes, config.log.max_files)
                .with_context(|| format!("creating {}", path.display()))?;
            let summary = run_headless(&mut plant, scenario, stop, |line| out.write_line(line))
                .with_context(|| format!("writing {}", path.display()))?;
            out.flush()?;
            summary
        }
        None => run_headless(&mut plant, scenario, stop, |_| Ok::<_, std::io::Error>(()))?,
    };
    Ok(summary)
}

pub fn summary_json(summary: &HeadlessSummary) -> serde_json::Value {
    json!({
        "cycles_run": summary.cycles_run,
        "rejected_commands": summary.rejected_commands,
        "final_snapshot": summary.final_snapshot,
    })
}

/// Reads a JSON or structured-text model and returns its declarations.
pub fn codegen(text: &str) -> Result<String, CodegenError> {
    parse_model(text).map(|m| emit_st(&m))
}

pub fn codegen_file(model: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(model)
        .with_context(|| format!("reading {}", model.display()))?;
    let st = codegen(&text)?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            w.write_all(st.as_bytes())?;
            w.flush()?;
        }
        None => print!("{st}"),
    }
    Ok(())
}

/// Failure of a subcommand, carrying its process exit status.
#[derive(Debug)]
pub enum CliError {
    Codegen(CodegenError),
    Other(anyhow::Error),
}

impl CliError {
    /// 1 for I/O and configuration problems, 3 and up for model errors
    /// (2 is left to argument parsing).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Codegen(e) => match e.kind {
                ErrorKind::Syntax => 3,
                ErrorKind::UnresolvedReference => 4,
                ErrorKind::CyclicInheritance => 5,
                ErrorKind::DuplicateName => 6,
                ErrorKind::UnknownBlock => 7,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Codegen(e) => write!(f, "{e}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<CodegenError> for CliError {
    fn from(e: CodegenError) -> Self {
        CliError::Codegen(e)
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}
