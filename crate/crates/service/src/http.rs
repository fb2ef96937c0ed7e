//! The `/v1` HTTP API.

use std::sync::Arc;

use archgame_core::model::{Coalition, Decomposition};
use archgame_core::solver::UTILITY_EPS;
use archgame_core::{corpus, io, GameContext};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::session::{ChildSpec, Mode, NodeId, ParamsDoc, SessionError, SessionTree};
use crate::store::Store;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/v1/sessions", post(create_session).get(list_sessions))
        .route("/v1/sessions/{sid}", get(get_session).delete(delete_session))
        .route("/v1/sessions/{sid}/export", get(export))
        .route("/v1/sessions/{sid}/nodes/{nid}", get(get_node))
        .route("/v1/sessions/{sid}/nodes/{nid}/params", put(set_params))
        .route("/v1/sessions/{sid}/nodes/{nid}/decompose", post(decompose))
        .route("/v1/sessions/{sid}/nodes/{nid}/children", post(accept_children))
        .route("/v1/sessions/{sid}/nodes/{nid}/terminate", post(terminate))
        .route("/v1/sessions/{sid}/nodes/{nid}/what-if", post(what_if))
        .route("/v1/sessions/{sid}/nodes/{nid}/graph", get(graph))
        .route("/v1/jobs/{jid}", get(get_job))
        .with_state(store)
}

pub(crate) fn status_of(e: &SessionError) -> StatusCode {
    match e {
        SessionError::NotFound(_) => StatusCode::NOT_FOUND,
        SessionError::Conflict(_) => StatusCode::CONFLICT,
        SessionError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl From<archgame_core::Error> for ApiError {
    fn from(e: archgame_core::Error) -> Self {
        ApiError(e.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (status_of(&self.0), Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    model: Option<Value>,
    corpus: Option<String>,
    params: Option<ParamsDoc>,
}

#[derive(Serialize)]
struct SessionSummary {
    id: String,
    name: String,
    root: NodeId,
    nodes: usize,
}

fn summary(tree: &SessionTree) -> SessionSummary {
    SessionSummary {
        id: tree.id.clone(),
        name: tree.nodes[&tree.root].model.primitive.name.clone(),
        root: tree.root,
        nodes: tree.nodes.len(),
    }
}

async fn create_session(
    State(store): State<Arc<Store>>,
    Json(body): Json<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionSummary>)> {
    let mut model = match (body.model, body.corpus) {
        (Some(v), None) => io::model_from_value(v)?,
        (None, Some(name)) => corpus::by_name(&name)?,
        _ => return Err(SessionError::Invalid("give exactly one of `model` and `corpus`".into()).into()),
    };
    if let Some(p) = body.params {
        model.params = Some(p.to_params()?);
    }
    let tree = SessionTree::new(uuid::Uuid::new_v4().simple().to_string(), model)?;
    let out = summary(&tree);
    store.insert(tree).await?;
    Ok((StatusCode::CREATED, Json(out)))
}

async fn list_sessions(State(store): State<Arc<Store>>) -> ApiResult<Json<Vec<SessionSummary>>> {
    let mut out = Vec::new();
    for id in store.ids().await {
        if let Ok(tree) = store.get(&id).await {
            out.push(summary(&*tree.read().await));
        }
    }
    Ok(Json(out))
}

async fn get_session(State(store): State<Arc<Store>>, Path(sid): Path<String>) -> ApiResult<Json<Value>> {
    let tree = store.get(&sid).await?;
    let tree = tree.read().await;
    let mut v = serde_json::to_value(&*tree).expect("sessions serialize");
    v["coverage"] = serde_json::to_value(tree.coverage()).expect("coverage serializes");
    Ok(Json(v))
}

async fn delete_session(State(store): State<Arc<Store>>, Path(sid): Path<String>) -> ApiResult<StatusCode> {
    store.remove(&sid).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_node(State(store): State<Arc<Store>>, Path((sid, nid)): Path<(String, NodeId)>) -> ApiResult<Json<Value>> {
    let tree = store.get(&sid).await?;
    let tree = tree.read().await;
    Ok(Json(serde_json::to_value(tree.node(nid)?).expect("nodes serialize")))
}

async fn set_params(
    State(store): State<Arc<Store>>,
    Path((sid, nid)): Path<(String, NodeId)>,
    Json(body): Json<ParamsDoc>,
) -> ApiResult<Json<Value>> {
    let params = body.to_params()?;
    let shared = store.get(&sid).await?;
    let mut tree = shared.write().await;
    tree.set_params(nid, params)?;
    store.persist(&tree)?;
    Ok(Json(serde_json::to_value(tree.node(nid)?).expect("nodes serialize")))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SolveRequest {
    #[serde(default)]
    exact: bool,
    k: Option<usize>,
    cap: Option<usize>,
}

async fn decompose(
    State(store): State<Arc<Store>>,
    Path((sid, nid)): Path<(String, NodeId)>,
    body: Option<Json<SolveRequest>>,
) -> ApiResult<Response> {
    let req = body.map(|b| b.0).unwrap_or_default();
    let params = {
        let shared = store.get(&sid).await?;
        let tree = shared.read().await;
        tree.node(nid)?.params()
    };
    let mode = Mode::from_request(req.exact, req.k, req.cap, &params)?;
    Ok(match store.decompose(&sid, nid, mode).await? {
        Ok(report) => Json(report).into_response(),
        Err(job) => (
            StatusCode::ACCEPTED,
            Json(json!({ "job": job, "poll": format!("/v1/jobs/{job}") })),
        )
            .into_response(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChildrenRequest {
    #[serde(default)]
    accept: Vec<ChildSpec>,
    #[serde(default)]
    remove: Vec<String>,
}

async fn accept_children(
    State(store): State<Arc<Store>>,
    Path((sid, nid)): Path<(String, NodeId)>,
    Json(body): Json<ChildrenRequest>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let shared = store.get(&sid).await?;
    let mut tree = shared.write().await;
    let accepted = tree.accept_children(nid, &body.accept, &body.remove)?;
    store.persist(&tree)?;
    Ok((StatusCode::CREATED, Json(json!({ "children": accepted }))))
}

async fn terminate(State(store): State<Arc<Store>>, Path((sid, nid)): Path<(String, NodeId)>) -> ApiResult<Json<Value>> {
    let shared = store.get(&sid).await?;
    let mut tree = shared.write().await;
    tree.terminate(nid)?;
    store.persist(&tree)?;
    Ok(Json(serde_json::to_value(tree.node(nid)?).expect("nodes serialize")))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct WhatIfRequest {
    params: Option<ParamsDoc>,
    #[serde(default)]
    exact: bool,
    k: Option<usize>,
    cap: Option<usize>,
}

async fn what_if(
    State(store): State<Arc<Store>>,
    Path((sid, nid)): Path<(String, NodeId)>,
    body: Option<Json<WhatIfRequest>>,
) -> ApiResult<Json<Value>> {
    let req = body.map(|b| b.0).unwrap_or_default();
    let tree = store.get(&sid).await?.read().await.clone();
    let node_params = tree.node(nid)?.params();
    let params = req.params.map(|p| p.to_params()).transpose()?;
    let mode = Mode::from_request(req.exact, req.k, req.cap, params.as_ref().unwrap_or(&node_params))?;
    let report = tokio::task::spawn_blocking(move || tree.what_if(nid, params, mode))
        .await
        .map_err(|e| SessionError::Invalid(format!("solver crashed: {e}")))??;
    Ok(Json(serde_json::to_value(report).expect("reports serialize")))
}

#[derive(Deserialize)]
struct GraphQuery {
    format: Option<String>,
}

async fn graph(
    State(store): State<Arc<Store>>,
    Path((sid, nid)): Path<(String, NodeId)>,
    Query(q): Query<GraphQuery>,
) -> ApiResult<Response> {
    let (model, clusters) = {
        let shared = store.get(&sid).await?;
        let tree = shared.read().await;
        let node = tree.node(nid)?;
        let clusters = node.report.as_ref().map(|r| {
            Decomposition::new(
                r.coalitions
                    .iter()
                    .map(|c| Coalition::new(c.members.iter().map(String::as_str)))
                    .collect(),
            )
        });
        (node.model.clone(), clusters)
    };
    let params = model.params_or_default();
    let ctx = GameContext::new(model.primitive, params)?;
    match q.format.as_deref() {
        Some("dot") => Ok((
            [(header::CONTENT_TYPE, "text/vnd.graphviz")],
            io::export_dot(&ctx, clusters.as_ref()),
        )
            .into_response()),
        None | Some("json") => {
            let all = ctx.all_indices();
            let nodes: Vec<Value> = all
                .iter()
                .map(|&i| {
                    json!({
                        "id": ctx.id(i).as_str(),
                        "kind": if ctx.is_functional_idx(i) { "functional" } else { "scenario" },
                    })
                })
                .collect();
            let mut edges = Vec::new();
            for &a in &all {
                for &b in &all[a + 1..] {
                    let w = ctx.pair_interaction_idx(a, b, &all);
                    if w.abs() > UTILITY_EPS {
                        edges.push(json!({
                            "a": ctx.id(a).as_str(),
                            "b": ctx.id(b).as_str(),
                            "interaction": w,
                            "relevance": ctx.sigma_table().get(a, b),
                        }));
                    }
                }
            }
            Ok(Json(json!({ "nodes": nodes, "edges": edges })).into_response())
        }
        Some(other) => Err(SessionError::Invalid(format!("unknown graph format `{other}`")).into()),
    }
}

async fn export(State(store): State<Arc<Store>>, Path(sid): Path<String>) -> ApiResult<Response> {
    let shared = store.get(&sid).await?;
    let tree = shared.read().await;
    Ok(match tree.export() {
        Ok(doc) => Json(doc).into_response(),
        Err(gaps) => (
            StatusCode::CONFLICT,
            Json(json!({
                "error": "architecture does not cover every requirement",
                "missing": gaps.missing,
                "unfinished": gaps.unfinished,
            })),
        )
            .into_response(),
    })
}

async fn get_job(State(store): State<Arc<Store>>, Path(jid): Path<String>) -> ApiResult<Json<Value>> {
    let job = store
        .job(&jid)
        .ok_or_else(|| SessionError::NotFound(format!("no job {jid}")))?;
    Ok(Json(serde_json::to_value(job).expect("jobs serialize")))
}
