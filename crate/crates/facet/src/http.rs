use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query as QueryParams, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use mariner_core::query::{evaluate, parse_query, EntailmentMode, QueryError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::compile::QueryState;
use crate::run::{list_instances, run, stats, Snapshot};
use crate::{FacetError, FacetModel};

pub const DEFAULT_INSTANCE_LIMIT: usize = 20;

pub struct AppState {
    pub model: FacetModel,
    pub snapshot: Snapshot,
}

type Shared = Arc<AppState>;

struct ApiError(StatusCode, Value);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<FacetError> for ApiError {
    fn from(e: FacetError) -> Self {
        let status = match e {
            FacetError::UnknownCategory(_) | FacetError::UnknownConnection(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError(status, json!({ "error": e.to_string() }))
    }
}

fn parse_mode(mode: Option<&str>) -> Result<EntailmentMode, ApiError> {
    mode.map_or(Ok(EntailmentMode::Rdfs), |m| {
        m.parse().map_err(|e: String| ApiError(StatusCode::BAD_REQUEST, json!({ "error": e })))
    })
}

#[derive(Serialize)]
struct CategoryOut<'a> {
    id: &'a str,
    label: &'a str,
}

#[derive(Serialize)]
struct ConnectionOut<'a> {
    id: &'a str,
    label: &'a str,
    target: &'a str,
}

async fn categories(State(app): State<Shared>) -> Json<Vec<Value>> {
    Json(
        app.model
            .categories()
            .iter()
            .map(|c| json!(CategoryOut { id: &c.id, label: &c.label }))
            .collect(),
    )
}

async fn connections(State(app): State<Shared>, Path(id): Path<String>) -> Result<Json<Vec<Value>>, ApiError> {
    app.model.category(&id)?;
    Ok(Json(
        app.model
            .connections_from(&id)
            .map(|c| json!(ConnectionOut { id: &c.id, label: &c.label, target: &c.target }))
            .collect(),
    ))
}

#[derive(Deserialize)]
struct InstanceParams {
    category: String,
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

async fn instances(State(app): State<Shared>, QueryParams(p): QueryParams<InstanceParams>) -> Result<Json<Value>, ApiError> {
    let limit = p.limit.unwrap_or(DEFAULT_INSTANCE_LIMIT);
    let out = list_instances(&app.model, &app.snapshot, &p.category, &p.q, limit)?;
    Ok(Json(json!(out)))
}

#[derive(Deserialize)]
struct ModeParam {
    mode: Option<String>,
}

async fn query(
    State(app): State<Shared>,
    QueryParams(m): QueryParams<ModeParam>,
    Json(state): Json<QueryState>,
) -> Result<Json<Value>, ApiError> {
    let mode = parse_mode(m.mode.as_deref())?;
    Ok(Json(json!(run(&state, &app.model, &app.snapshot, mode)?)))
}

#[derive(Deserialize)]
struct SparqlBody {
    query: String,
    mode: Option<String>,
}

async fn sparql(State(app): State<Shared>, Json(body): Json<SparqlBody>) -> Result<Json<Value>, ApiError> {
    let mode = parse_mode(body.mode.as_deref())?;
    let q = parse_query(&body.query).map_err(|e: QueryError| {
        let (line, column) = e.position();
        ApiError(
            StatusCode::BAD_REQUEST,
            json!({ "error": e.to_string(), "line": line, "column": column }),
        )
    })?;
    let table = evaluate(&q, &app.snapshot.graph, &app.snapshot.schema, mode);
    Ok(Json(table.to_json()))
}

async fn stats_handler(State(app): State<Shared>) -> Json<Value> {
    Json(json!(stats(&app.snapshot)))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/categories", get(categories))
        .route("/api/categories/{id}/connections", get(connections))
        .route("/api/instances", get(instances))
        .route("/api/query", post(query))
        .route("/api/sparql", post(sparql))
        .route("/api/stats", get(stats_handler))
        .with_state(Arc::new(state))
}

/// Serves the API until the process is stopped.
pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
