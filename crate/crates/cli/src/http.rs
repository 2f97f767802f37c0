//! REST endpoints and the per-cycle WebSocket feed over a running
//! [`ControlService`].

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use liqueur_plant::codegen::plant_model;
use liqueur_plant::plant::{Actuator, SiloId};
use liqueur_plant::process::{ProcessId, Recipe, RecipeOverrides};
use liqueur_plant::service::{Ack, ControlCommand, ControlError, ControlService, ErrorCode};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;

/// WebSocket close code sent with `SUBSCRIBER_OVERFLOW`.
pub const OVERFLOW_CLOSE_CODE: u16 = 4000;

const OVERFLOW_SEND_TIMEOUT: Duration = Duration::from_secs(5);

pub type AppState = Arc<ControlService>;

pub fn router(service: AppState) -> Router {
    Router::new()
        .route("/api/state", get(state))
        .route("/api/process", post(start_process))
        .route("/api/process/{id}", delete(abort_process))
        .route("/api/silo/{id}/actuator", post(manual_actuator))
        .route("/api/sim/{action}", post(sim))
        .route("/api/model", get(model))
        .route("/api/events", get(events))
        .with_state(service)
}

pub struct ApiError(ControlError);

impl From<ControlError> for ApiError {
    fn from(e: ControlError) -> Self {
        ApiError(e)
    }
}

pub fn status_for(code: ErrorCode) -> StatusCode {
    match code {
        ErrorCode::Validation => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorCode::Conflict | ErrorCode::SilosBusy | ErrorCode::AlreadyDone => StatusCode::CONFLICT,
        ErrorCode::UnknownProcess => StatusCode::NOT_FOUND,
        ErrorCode::ServiceNotReady => StatusCode::SERVICE_UNAVAILABLE,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (status_for(self.0.code), Json(self.0)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Bodies are parsed here rather than by `Json<T>` so that every malformed
/// or ill-typed payload maps to the same VALIDATION error.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ControlError::validation(format!("bad request body: {e}")).into())
}

fn accepted(ack: Ack) -> Response {
    (StatusCode::ACCEPTED, Json(ack)).into_response()
}

async fn state(State(svc): State<AppState>) -> ApiResult<Response> {
    Ok(Json(svc.state()?).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StartBody {
    recipe: Recipe,
    #[serde(default)]
    config: RecipeOverrides,
}

#[derive(Debug, Serialize)]
struct Started {
    process_id: ProcessId,
    effective_cycle: u64,
}

async fn start_process(State(svc): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let body: StartBody = parse_body(&body)?;
    let ack = svc
        .submit(ControlCommand::StartProcess {
            recipe: body.recipe,
            params: body.config,
        })
        .await?;
    let process_id = ack.process.expect("accepted starts name their process");
    Ok((
        StatusCode::ACCEPTED,
        Json(Started {
            process_id,
            effective_cycle: ack.effective_cycle,
        }),
    )
        .into_response())
}

async fn abort_process(State(svc): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let process: u32 = id
        .trim_start_matches('P')
        .parse()
        .map_err(|_| ControlError::validation(format!("bad process id `{id}`")))?;
    let ack = svc
        .submit(ControlCommand::AbortProcess {
            process: ProcessId(process),
        })
        .await?;
    Ok(accepted(ack))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActuatorBody {
    actuator: Actuator,
    value: bool,
}

async fn manual_actuator(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let silo: SiloId = id
        .parse()
        .map_err(|e| ControlError::validation(format!("{e}")))?;
    let body: ActuatorBody = parse_body(&body)?;
    let ack = svc
        .submit(ControlCommand::ManualActuator {
            silo,
            actuator: body.actuator,
            value: body.value,
        })
        .await?;
    Ok(accepted(ack))
}

#[derive(Debug, Deserialize)]
struct StepQuery {
    n: Option<String>,
}

async fn sim(
    State(svc): State<AppState>,
    Path(action): Path<String>,
    Query(q): Query<StepQuery>,
) -> ApiResult<Response> {
    let command = match action.as_str() {
        "pause" => ControlCommand::Pause,
        "resume" => ControlCommand::Resume,
        "step" => {
            let n = match q.n.as_deref() {
                None => 1,
                Some(raw) => raw
                    .parse()
                    .map_err(|_| ControlError::validation(format!("bad step count `{raw}`")))?,
            };
            ControlCommand::StepN { n }
        }
        other => {
            return Err(ControlError::validation(format!(
                "unknown action `{other}` (pause, resume or step)"
            ))
            .into())
        }
    };
    Ok(accepted(svc.submit(command).await?))
}

async fn model() -> Response {
    Json(plant_model()).into_response()
}

async fn events(State(svc): State<AppState>, ws: WebSocketUpgrade) -> Response {
    let rx = svc.subscribe();
    ws.on_upgrade(move |socket| forward(socket, rx))
}

async fn forward(
    mut socket: WebSocket,
    mut rx: tokio::sync::broadcast::Receiver<Arc<liqueur_plant::service::StreamMessage>>,
) {
    loop {
        tokio::select! {
            next = rx.recv() => match next {
                Ok(msg) => {
                    let text = match serde_json::to_string(&*msg) {
                        Ok(t) => t,
                        Err(e) => {
                            log::error!("event serialization failed: {e}");
                            continue;
                        }
                    };
                    if socket.send(Message::Text(text.into())).await.is_err() {
                        return;
                    }
                }
                Err(RecvError::Lagged(missed)) => {
                    log::warn!("event subscriber fell {missed} messages behind; disconnecting");
                    let notice = json!({
                        "code": "SUBSCRIBER_OVERFLOW",
                        "message": format!("subscriber missed {missed} messages"),
                    });
                    let close = CloseFrame {
                        code: OVERFLOW_CLOSE_CODE,
                        reason: "SUBSCRIBER_OVERFLOW".into(),
                    };
                    let _ = tokio::time::timeout(OVERFLOW_SEND_TIMEOUT, async {
                        socket.send(Message::Text(notice.to_string().into())).await?;
                        socket.send(Message::Close(Some(close))).await
                    })
                    .await;
                    return;
                }
                Err(RecvError::Closed) => {
                    let _ = socket.send(Message::Close(None)).await;
                    return;
                }
            },
            incoming = socket.recv() => match incoming {
                None | Some(Err(_)) | Some(Ok(Message::Close(_))) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
