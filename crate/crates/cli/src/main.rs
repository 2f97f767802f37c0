use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use liqueur_plant::service::{ControlService, Scenario, SystemConfig};
use liqueur_plant_cli::{codegen_file, run_scenario, serve, summary_json, CliError};

#[derive(Parser)]
#[command(name = "liqueur-plant", version, about = "Simulated liqueur plant control system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the plant in real time behind the HTTP and WebSocket API.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "LIQUEUR_PLANT_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Run log (JSON lines); overrides the configured path.
        #[arg(long, env = "LIQUEUR_PLANT_LOG")]
        log: Option<PathBuf>,
    },
    /// Run a scenario headless, without waiting between cycles.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Cycles to run; by default the run stops once every process is done.
        #[arg(long)]
        cycles: Option<u64>,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Generate structured-text declarations from a JSON or ST model.
    Codegen {
        model: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&PathBuf>) -> anyhow::Result<SystemConfig> {
    match path {
        Some(p) => SystemConfig::load(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(SystemConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Serve {
            config,
            port,
            bind,
            log,
        } => {
            let mut config = load_config(config.as_ref())?;
            if log.is_some() {
                config.log.path = log;
            }
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let service = Arc::new(
                    ControlService::spawn(config).context("starting the control service")?,
                );
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port))
                    .await
                    .with_context(|| format!("binding {bind}:{port}"))?;
                log::info!("listening on {}", listener.local_addr()?);
                serve(listener, service, async {
                    let _ = tokio::signal::ctrl_c().await;
                    log::info!("shutting down");
                })
                .await?;
                Ok::<_, CliError>(())
            })
        }
        Command::Run {
            config,
            scenario,
            cycles,
            log,
        } => {
            let config = load_config(config.as_ref())?;
            let scenario = match scenario {
                Some(p) => Scenario::load(&p).with_context(|| format!("loading {}", p.display()))?,
                None => Scenario::default(),
            };
            let summary = run_scenario(config, &scenario, cycles, log.as_deref())?;
            let text = serde_json::to_string_pretty(&summary_json(&summary))
                .map_err(anyhow::Error::from)?;
            println!("{text}");
            Ok(())
        }
        Command::Codegen { model, out } => codegen_file(&model, out.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
