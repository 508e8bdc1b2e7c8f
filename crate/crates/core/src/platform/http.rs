//! HTTP/JSON API over a [`Platform`].

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, Request, State};
use axum::http::header::{AUTHORIZATION, CONTENT_TYPE};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use super::views::{self, GraphFormat, DEFAULT_NAME_LIMIT, DEFAULT_THEOREM_LIMIT};
use super::{CorpusState, Platform, PlatformError};
use crate::annotate::AnnotationError;
use crate::article::{Anchor, ArticleName};
use crate::lsi::LsiError;
use crate::names::EntryKind;
use crate::users::UserId;

pub const CORPUS_HASH_HEADER: &str = "x-corpus-hash";

type Shared = Arc<Platform>;

pub fn status_of(e: &PlatformError) -> StatusCode {
    match e {
        PlatformError::Unauthorized => StatusCode::UNAUTHORIZED,
        PlatformError::Forbidden(_) => StatusCode::FORBIDDEN,
        PlatformError::NotFound(_) => StatusCode::NOT_FOUND,
        PlatformError::BadRequest(_) | PlatformError::Config(_) => StatusCode::BAD_REQUEST,
        PlatformError::NoCorpus => StatusCode::SERVICE_UNAVAILABLE,
        PlatformError::InvalidCorpus(_) | PlatformError::Parse { .. } | PlatformError::Graph(_) => {
            StatusCode::UNPROCESSABLE_ENTITY
        }
        PlatformError::Annotation(a) => match a {
            AnnotationError::UserBlocked(_) => StatusCode::FORBIDDEN,
            AnnotationError::UnknownAnchor(_) | AnnotationError::UnknownRevision { .. } => StatusCode::NOT_FOUND,
            AnnotationError::Frozen(_) => StatusCode::CONFLICT,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        },
        PlatformError::Lsi(LsiError::UserBlocked(_)) => StatusCode::FORBIDDEN,
        PlatformError::Lsi(LsiError::EmptyCorpus | LsiError::DuplicateDocument(_)) => StatusCode::UNPROCESSABLE_ENTITY,
        PlatformError::Lsi(_) | PlatformError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

struct ApiError(PlatformError);

impl From<PlatformError> for ApiError {
    fn from(e: PlatformError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = status_of(&self.0);
        if status.is_server_error() {
            log::error!("{}", self.0);
        }
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn with_hash(mut response: Response, state: &CorpusState) -> Response {
    if let Ok(v) = HeaderValue::from_str(&state.corpus_hash) {
        response.headers_mut().insert(CORPUS_HASH_HEADER, v);
    }
    response
}

/// A pre-rendered JSON body answered from `state`, newline-terminated like
/// the command-line output of the same view.
fn json_body(state: &CorpusState, mut body: String) -> Response {
    body.push('\n');
    with_hash(([(CONTENT_TYPE, "application/json")], body).into_response(), state)
}

fn text_body(state: &CorpusState, content_type: &'static str, body: String) -> Response {
    with_hash(([(CONTENT_TYPE, content_type)], body).into_response(), state)
}

fn token(headers: &HeaderMap) -> Option<&str> {
    headers.get(AUTHORIZATION)?.to_str().ok()?.strip_prefix("Bearer ").map(str::trim)
}

fn anchor(raw: &str) -> Result<Anchor, ApiError> {
    raw.parse().map_err(|_| ApiError(PlatformError::BadRequest(format!("malformed anchor {raw:?}"))))
}

fn article_name(raw: &str) -> Result<ArticleName, ApiError> {
    ArticleName::new(raw).map_err(|_| ApiError(PlatformError::NotFound(format!("article {raw}"))))
}

/// Adds the current corpus hash to responses that did not set one.
async fn corpus_hash_header(State(p): State<Shared>, request: Request, next: Next) -> Response {
    let mut response = next.run(request).await;
    if !response.headers().contains_key(CORPUS_HASH_HEADER) {
        if let Ok(state) = p.snapshot() {
            if let Ok(v) = HeaderValue::from_str(&state.corpus_hash) {
                response.headers_mut().insert(CORPUS_HASH_HEADER, v);
            }
        }
    }
    response
}

pub fn router(platform: Shared) -> Router {
    Router::new()
        .route("/api/state", get(state_summary))
        .route("/api/articles", get(list_articles))
        .route("/api/articles/{name}", get(get_article))
        .route("/articles/{name}", get(article_page))
        .route("/api/search/names", get(search_names))
        .route("/api/search/theorems", post(search_theorems))
        .route("/api/feedback", post(post_feedback))
        .route("/api/comments/{anchor}", get(get_comment).post(post_comment).delete(delete_comment))
        .route("/api/comments/{anchor}/history", get(comment_history))
        .route("/api/comments/{anchor}/rollback", post(rollback_comment))
        .route("/api/graph", get(graph_json))
        .route("/api/graph/neighborhood", get(graph_neighborhood))
        .route("/api/graph/layers", get(graph_layers))
        .route("/api/graph.dot", get(graph_dot))
        .route("/api/admin/users/{id}/block", post(block_user))
        .route("/api/admin/update", post(admin_update))
        .route("/api/admin/resolve/{article}", post(admin_resolve))
        .layer(middleware::from_fn_with_state(platform.clone(), corpus_hash_header))
        .with_state(platform)
}

/// Serves until Ctrl-C.
pub async fn serve(platform: Shared, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(platform))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn state_summary(State(p): State<Shared>) -> ApiResult {
    let s = p.snapshot()?;
    Ok(json_body(&s, views::summary_json(&s)))
}

async fn list_articles(State(p): State<Shared>) -> ApiResult {
    let s = p.snapshot()?;
    Ok(json_body(&s, views::articles_json(&s)))
}

async fn get_article(State(p): State<Shared>, Path(name): Path<String>) -> ApiResult {
    let s = p.snapshot()?;
    let body = p.article_json(&s, &article_name(&name)?)?;
    Ok(json_body(&s, body))
}

async fn article_page(State(p): State<Shared>, Path(name): Path<String>) -> ApiResult {
    let s = p.snapshot()?;
    let body = p.article_page(&s, &article_name(&name)?)?;
    Ok(text_body(&s, "text/html; charset=utf-8", body))
}

#[derive(Deserialize)]
struct NamesQuery {
    #[serde(default)]
    q: String,
    kind: Option<String>,
    limit: Option<usize>,
}

async fn search_names(State(p): State<Shared>, Query(q): Query<NamesQuery>) -> ApiResult {
    let kind = match q.kind.as_deref().filter(|k| !k.is_empty()) {
        Some(k) => Some(k.parse::<EntryKind>().map_err(|e| ApiError(PlatformError::BadRequest(e)))?),
        None => None,
    };
    let s = p.snapshot()?;
    Ok(json_body(&s, views::names_json(&s, &q.q, kind, q.limit.unwrap_or(DEFAULT_NAME_LIMIT))))
}

#[derive(Deserialize)]
struct TheoremQuery {
    query: String,
    limit: Option<usize>,
}

async fn search_theorems(State(p): State<Shared>, Json(q): Json<TheoremQuery>) -> ApiResult {
    let s = p.snapshot()?;
    Ok(json_body(&s, views::theorems_json(&s, &q.query, q.limit.unwrap_or(DEFAULT_THEOREM_LIMIT))))
}

#[derive(Deserialize)]
struct FeedbackBody {
    query: String,
    anchor: String,
}

async fn post_feedback(State(p): State<Shared>, headers: HeaderMap, Json(b): Json<FeedbackBody>) -> ApiResult {
    let user = p.authenticate(token(&headers))?;
    let record = p.feedback(&user, &b.query, &anchor(&b.anchor)?)?;
    Ok(Json(record).into_response())
}

async fn get_comment(State(p): State<Shared>, Path(raw): Path<String>) -> ApiResult {
    Ok(Json(p.latest_comment(&anchor(&raw)?)?).into_response())
}

#[derive(Deserialize)]
struct CommentBody {
    body: String,
}

async fn post_comment(
    State(p): State<Shared>,
    Path(raw): Path<String>,
    headers: HeaderMap,
    Json(b): Json<CommentBody>,
) -> ApiResult {
    let user = p.authenticate(token(&headers))?;
    Ok(Json(p.save_comment(&user, &anchor(&raw)?, &b.body)?).into_response())
}

async fn delete_comment(State(p): State<Shared>, Path(raw): Path<String>, headers: HeaderMap) -> ApiResult {
    let admin = p.authenticate_admin(token(&headers))?;
    Ok(Json(p.delete_comment(&admin, &anchor(&raw)?)?).into_response())
}

async fn comment_history(State(p): State<Shared>, Path(raw): Path<String>) -> ApiResult {
    Ok(Json(p.comment_history(&anchor(&raw)?)?).into_response())
}

#[derive(Deserialize)]
struct RollbackBody {
    to: u64,
}

async fn rollback_comment(
    State(p): State<Shared>,
    Path(raw): Path<String>,
    headers: HeaderMap,
    Json(b): Json<RollbackBody>,
) -> ApiResult {
    let user = p.authenticate(token(&headers))?;
    Ok(Json(p.rollback_comment(&user, &anchor(&raw)?, b.to)?).into_response())
}

#[derive(Deserialize)]
struct GraphQuery {
    #[serde(default)]
    reduced: bool,
}

async fn graph_json(State(p): State<Shared>, Query(q): Query<GraphQuery>) -> ApiResult {
    let s = p.snapshot()?;
    Ok(json_body(&s, views::graph_text(&s, GraphFormat::Json, q.reduced)))
}

async fn graph_dot(State(p): State<Shared>, Query(q): Query<GraphQuery>) -> ApiResult {
    let s = p.snapshot()?;
    Ok(text_body(&s, "text/vnd.graphviz", views::graph_text(&s, GraphFormat::Dot, q.reduced)))
}

async fn graph_layers(State(p): State<Shared>) -> ApiResult {
    let s = p.snapshot()?;
    Ok(text_body(&s, "text/plain; charset=utf-8", views::layers_table(&s)))
}

#[derive(Deserialize)]
struct NeighborhoodQuery {
    node: String,
    #[serde(default = "one")]
    radius: usize,
    #[serde(default)]
    reduced: bool,
}

fn one() -> usize {
    1
}

async fn graph_neighborhood(State(p): State<Shared>, Query(q): Query<NeighborhoodQuery>) -> ApiResult {
    let s = p.snapshot()?;
    let node = article_name(&q.node)?;
    let body = views::neighborhood_json(&s, &node, q.radius, q.reduced)
        .map_err(|_| ApiError(PlatformError::NotFound(format!("article {node}"))))?;
    Ok(json_body(&s, body))
}

#[derive(Deserialize)]
struct BlockBody {
    #[serde(default = "yes")]
    blocked: bool,
}

fn yes() -> bool {
    true
}

async fn block_user(
    State(p): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Option<Json<BlockBody>>,
) -> ApiResult {
    let admin = p.authenticate_admin(token(&headers))?;
    let blocked = body.is_none_or(|Json(b)| b.blocked);
    Ok(Json(p.set_blocked(&admin, &UserId(id), blocked)?).into_response())
}

#[derive(Deserialize)]
struct UpdateBody {
    path: String,
    label: String,
}

async fn admin_update(State(p): State<Shared>, headers: HeaderMap, Json(b): Json<UpdateBody>) -> ApiResult {
    p.authenticate_admin(token(&headers))?;
    let platform = p.clone();
    let report = tokio::task::spawn_blocking(move || platform.update(std::path::Path::new(&b.path), &b.label))
        .await
        .map_err(|e| ApiError(PlatformError::Io { path: "update".to_owned(), message: e.to_string() }))??;
    Ok(Json(report).into_response())
}

#[derive(Deserialize)]
struct ResolveBody {
    #[serde(default)]
    mapping: BTreeMap<String, String>,
}

async fn admin_resolve(
    State(p): State<Shared>,
    Path(article): Path<String>,
    headers: HeaderMap,
    Json(b): Json<ResolveBody>,
) -> ApiResult {
    let admin = p.authenticate_admin(token(&headers))?;
    let mut mapping = BTreeMap::new();
    for (from, to) in &b.mapping {
        mapping.insert(anchor(from)?, anchor(to)?);
    }
    let histories = p.resolve(&admin, &article_name(&article)?, &mapping)?;
    Ok(Json(json!({ "article": article, "histories": histories })).into_response())
}
