//! Stateless HTTP facade over `run_simulation` and `run_grid`.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use confound_core::{run_grid, run_simulation, MonteCarloSummary, SimulationError};
use serde_json::{json, Map, Value};
use tower_http::cors::CorsLayer;

use crate::config::{parse_json, FieldError, SimulateRequest};

#[derive(Debug, Clone, Copy)]
pub struct ServiceOptions {
    pub workers: usize,
    pub max_replicates: u64,
    pub cors: bool,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        Self {
            workers: 4,
            max_replicates: 100_000,
            cors: false,
        }
    }
}

struct AppState {
    options: ServiceOptions,
    incidents: AtomicU64,
}

pub fn router(options: ServiceOptions) -> Router {
    let state = Arc::new(AppState {
        options,
        incidents: AtomicU64::new(0),
    });
    let app = Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/simulate", post(simulate))
        .with_state(state);
    if options.cors {
        app.layer(CorsLayer::permissive())
    } else {
        app
    }
}

pub async fn serve(bind: SocketAddr, options: ServiceOptions) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(options))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn error_response(status: StatusCode, field: Option<&str>, message: &str) -> Response {
    (status, Json(json!({"error": {"field": field, "message": message}}))).into_response()
}

fn bad_request(e: FieldError) -> Response {
    error_response(StatusCode::BAD_REQUEST, e.field.as_deref(), &e.message)
}

fn annotate(summary: &MonteCarloSummary, request_id: &Option<String>) -> Value {
    let mut obj: Map<String, Value> = match serde_json::to_value(summary) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    obj.insert("wall_time_ms".into(), json!(summary.wall_time.as_secs_f64() * 1e3));
    obj.insert("request_id".into(), json!(request_id));
    Value::Object(obj)
}

async fn simulate(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let req: SimulateRequest = match parse_json(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(e),
    };
    let config = match req.config() {
        Ok(c) => c,
        Err(e) => return bad_request(e.into()),
    };
    let grid = match req.grid() {
        Ok(g) => g,
        Err(e) => return bad_request(e.into()),
    };
    let points = grid.as_ref().map_or(1, |g| g.values.len() as u64);
    let cap = state.options.max_replicates;
    if config.n_replicates.saturating_mul(points) > cap {
        return error_response(
            StatusCode::UNPROCESSABLE_ENTITY,
            Some("n_replicates"),
            &format!(
                "{} replicates × {points} grid point(s) exceeds the limit of {cap} per request",
                config.n_replicates
            ),
        );
    }
    let workers = state.options.workers;
    let grid_run = grid.clone();
    let outcome = tokio::task::spawn_blocking(move || match grid_run {
        Some(g) => run_grid(&config, g.axis, &g.values, workers),
        None => run_simulation(&config, workers).map(|s| vec![s]),
    })
    .await;

    match outcome {
        Ok(Ok(summaries)) => {
            let body = if grid.is_some() {
                Value::Array(summaries.iter().map(|s| annotate(s, &req.request_id)).collect())
            } else {
                annotate(&summaries[0], &req.request_id)
            };
            (StatusCode::OK, Json(body)).into_response()
        }
        Ok(Err(SimulationError::Config(e))) => bad_request(e.into()),
        Ok(Err(e)) => internal(&state, &e.to_string()),
        Err(e) => internal(&state, &e.to_string()),
    }
}

fn internal(state: &AppState, detail: &str) -> Response {
    let n = state.incidents.fetch_add(1, Ordering::Relaxed);
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let id = format!("{stamp:x}-{n:x}");
    log::error!("incident {id}: {detail}");
    (
        StatusCode::INTERNAL_SERVER_ERROR,
        Json(json!({"error": {"field": null, "message": "internal error", "id": id}})),
    )
        .into_response()
}
