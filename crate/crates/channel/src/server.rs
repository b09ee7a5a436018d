//! HTTP routes.
//!
//! | path | method | purpose |
//! |------|--------|---------|
//! | `/render` | GET, POST | the rendering channel |
//! | `/metadata` | GET | registry metadata as Turtle |
//! | `/describe?object=` | GET | structural description of an element |
//! | `/match?object=&userProfile=` | GET | candidate scores for a profile URL |
//! | `/match?object=` | POST | candidate scores for a profile in the body |
//! | `/register` | POST | register a template (`body`, `features`, `overwrite`) |
//! | `/submissions/{id}` | GET | a stored form submission as Turtle |
//! | `/ui` | GET | static client, when `uiDir` is configured |

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::to_bytes;
use axum::extract::{FromRequest, Multipart, Path, RawQuery, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response as HttpResponse};
use axum::routing::get;
use axum::Router;
use serde_json::{json, Value};
use thiserror::Error;
use tower_http::services::ServeDir;

use semrender_core::element_ref::parse_element_ref;
use semrender_core::matcher::{ColorSlot, MatchScore};
use semrender_core::rdf::{serialize_turtle_with_prefixes, parse_sniffed};
use semrender_core::registry::{FeaturesFile, TemplateKind};

use crate::config::Config;
use crate::engine::{Engine, EngineError, MatchReport, Response};
use crate::fetch::MAX_SOURCE_BYTES;
use crate::request::{Method, DATA};

const TURTLE: &str = "text/turtle; charset=utf-8";
const TEXT: &str = "text/plain; charset=utf-8";
const JSON: &str = "application/json";

type Shared = Arc<Engine>;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

pub fn router(engine: Shared, ui_dir: Option<PathBuf>) -> Router {
    let mut app = Router::new()
        .route("/render", get(render_get).post(render_post))
        .route("/metadata", get(metadata))
        .route("/describe", get(describe))
        .route("/match", get(match_get).post(match_post))
        .route("/register", axum::routing::post(register))
        .route("/submissions/{id}", get(submission));
    if let Some(dir) = ui_dir {
        app = app.nest_service("/ui", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    app.layer(axum::extract::DefaultBodyLimit::max(MAX_SOURCE_BYTES))
        .with_state(engine)
}

/// Binds the configured address and serves until the process ends.
pub async fn serve(config: &Config) -> Result<(), ServeError> {
    let engine = Arc::new(Engine::from_config(config)?);
    let addr = format!("{}:{}", config.host, config.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: addr.clone(),
            source,
        })?;
    tracing::info!(%addr, base_url = engine.base_url(), "serving");
    axum::serve(listener, router(engine, config.ui_dir.clone())).await?;
    Ok(())
}

/// Serves `engine` on an already bound listener; returns the bound address.
pub async fn spawn(engine: Shared, ui_dir: Option<PathBuf>, listener: tokio::net::TcpListener) -> SocketAddr {
    let addr = listener.local_addr().expect("bound listener");
    tokio::spawn(async move {
        let _ = axum::serve(listener, router(engine, ui_dir)).await;
    });
    addr
}

fn query_params(raw: Option<String>) -> Vec<(String, String)> {
    raw.map(|q| form_urlencoded::parse(q.as_bytes()).into_owned().collect())
        .unwrap_or_default()
}

fn plain(status: u16, content_type: &'static str, body: String) -> HttpResponse {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, [(header::CONTENT_TYPE, content_type)], body).into_response()
}

fn warning_value(text: &str) -> Option<HeaderValue> {
    let quoted = text.replace('\\', "\\\\").replace('"', "\\\"");
    HeaderValue::from_str(&format!("299 semrender \"{quoted}\"")).ok()
}

fn into_http(r: Response) -> HttpResponse {
    let mut res = plain(r.status, r.content_type, r.body);
    let headers = res.headers_mut();
    for w in &r.warnings {
        if let Some(v) = warning_value(w) {
            headers.append(header::WARNING, v);
        }
    }
    if let Some(v) = r.location.and_then(|l| HeaderValue::from_str(&l).ok()) {
        headers.insert(header::LOCATION, v);
    }
    if let Some(v) = r.template.and_then(|t| HeaderValue::from_str(&t).ok()) {
        headers.insert("x-semrender-template", v);
    }
    res
}

async fn render_get(State(engine): State<Shared>, RawQuery(q): RawQuery) -> HttpResponse {
    into_http(engine.handle_params(Method::Get, &query_params(q), None).await)
}

enum Payload {
    Fields(Vec<(String, String)>),
    Raw(String),
    Empty,
}

fn media_type(headers: &HeaderMap) -> String {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .map(|v| v.trim().to_ascii_lowercase())
        .unwrap_or_default()
}

/// Reads form fields or a raw RDF body, depending on the content type.
async fn read_payload(req: Request) -> Result<Payload, (u16, String)> {
    let media = media_type(req.headers());
    let bad = |e: String| (400, e);
    match media.as_str() {
        "multipart/form-data" => {
            let mut mp = Multipart::from_request(req, &())
                .await
                .map_err(|e| bad(e.body_text()))?;
            let mut fields = Vec::new();
            while let Some(field) = mp.next_field().await.map_err(|e| bad(e.body_text()))? {
                let name = field.name().unwrap_or_default().to_owned();
                let value = field.text().await.map_err(|e| bad(e.body_text()))?;
                fields.push((name, value));
            }
            Ok(Payload::Fields(fields))
        }
        _ => {
            let bytes = to_bytes(req.into_body(), MAX_SOURCE_BYTES)
                .await
                .map_err(|e| (413, e.to_string()))?;
            let text = String::from_utf8(bytes.to_vec()).map_err(|_| bad("request body is not UTF-8".into()))?;
            match media.as_str() {
                "application/x-www-form-urlencoded" => Ok(Payload::Fields(
                    form_urlencoded::parse(text.as_bytes()).into_owned().collect(),
                )),
                "text/turtle" | "application/n-triples" | "application/x-turtle" => {
                    Ok(Payload::Raw(text))
                }
                _ if text.trim().is_empty() => Ok(Payload::Empty),
                other => Err((415, format!("unsupported request content type {other:?}"))),
            }
        }
    }
}

async fn render_post(State(engine): State<Shared>, RawQuery(q): RawQuery, req: Request) -> HttpResponse {
    let mut params = query_params(q);
    let body = match read_payload(req).await {
        Ok(Payload::Fields(fields)) => {
            let mut data = None;
            for (k, v) in fields {
                if k == DATA {
                    if data.is_some() {
                        return error_response(&params, 400, "parameter data given more than once");
                    }
                    data = Some(v);
                } else {
                    params.push((k, v));
                }
            }
            data
        }
        Ok(Payload::Raw(text)) => Some(text),
        Ok(Payload::Empty) => None,
        Err((status, message)) => return error_response(&params, status, &message),
    };
    into_http(engine.handle_params(Method::Post, &params, body).await)
}

fn error_response(params: &[(String, String)], status: u16, message: &str) -> HttpResponse {
    let format = params
        .iter()
        .find(|(k, _)| k == crate::request::OUTPUT_FORMAT)
        .and_then(|(_, v)| v.parse().ok())
        .unwrap_or_default();
    plain(
        status,
        semrender_core::markup::MarkupFormat::content_type(format),
        crate::engine::error_page(format, status, message),
    )
}

async fn metadata(State(engine): State<Shared>) -> HttpResponse {
    plain(200, TURTLE, engine.metadata_turtle())
}

fn param<'a>(params: &'a [(String, String)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

async fn describe(State(engine): State<Shared>, RawQuery(q): RawQuery) -> HttpResponse {
    let params = query_params(q);
    let Some(object) = param(&params, "object") else {
        return plain(400, TEXT, "missing required parameter object\n".into());
    };
    let object = match parse_element_ref(object) {
        Ok(o) => o,
        Err(e) => return plain(400, TEXT, format!("{e}\n")),
    };
    match engine.describe(&object) {
        Ok(text) => plain(200, TEXT, text),
        Err(e) => plain(e.status(), TEXT, format!("{e}\n")),
    }
}

fn score_json(s: &MatchScore) -> Value {
    json!({
        "template": s.template,
        "hardPass": s.hard_pass,
        "aestheticDistance": s.aesthetic_distance,
        "colorPenalty": s.color_penalty,
        "total": s.total,
        "conflicts": s.conflicts.iter().map(|c| json!({
            "slot": match c.slot { ColorSlot::Primary => "primary", ColorSlot::Secondary => "secondary" },
            "color": c.color,
            "impairment": c.impairment.value(),
        })).collect::<Vec<_>>(),
        "trace": s.trace,
    })
}

/// JSON form of a match report.
pub fn report_json(object: &str, report: &MatchReport) -> Value {
    let p = &report.profile;
    let term = |t: &Option<semrender_core::rdf::Term>| t.as_ref().map(|t| t.value().to_owned());
    json!({
        "object": object,
        "profile": {
            "subject": term(&p.subject),
            "protocol": term(&p.protocol),
            "aesthetic": term(&p.aesthetic),
            "impairments": p.impairments.iter().map(|t| t.value()).collect::<Vec<_>>(),
        },
        "best": report.best().map(|s| s.template.clone()),
        "candidates": report.scores.iter().map(score_json).collect::<Vec<_>>(),
    })
}

fn match_target(params: &[(String, String)]) -> Result<(semrender_core::element_ref::ElementRef, TemplateKind), String> {
    let object = param(params, "object").ok_or("missing required parameter object\n")?;
    let object = parse_element_ref(object).map_err(|e| format!("{e}\n"))?;
    let kind = match param(params, "kind") {
        None => TemplateKind::Output,
        Some(k) => k.parse().map_err(|_| format!("unknown kind {k:?}\n"))?,
    };
    Ok((object, kind))
}

fn match_response(
    engine: &Engine,
    params: &[(String, String)],
    profile: &semrender_core::rdf::Graph,
    fragment: Option<&str>,
) -> HttpResponse {
    let (object, kind) = match match_target(params) {
        Ok(t) => t,
        Err(msg) => return plain(400, TEXT, msg),
    };
    match engine.match_profile(&object, kind, profile, fragment) {
        Ok(report) => plain(200, JSON, report_json(&object.to_string(), &report).to_string()),
        Err(e) => plain(e.status(), TEXT, format!("{e}\n")),
    }
}

async fn match_get(State(engine): State<Shared>, RawQuery(q): RawQuery) -> HttpResponse {
    let params = query_params(q);
    let profile = match param(&params, "userProfile") {
        None => semrender_core::rdf::Graph::new(),
        Some(u) => {
            let url = match url::Url::parse(u) {
                Ok(url) if matches!(url.scheme(), "http" | "https") => url,
                _ => return plain(400, TEXT, format!("invalid userProfile URL {u:?}\n")),
            };
            match engine.fetch_graph(&url).await {
                Ok(g) => return match_response(&engine, &params, &g, url.fragment()),
                Err(e) => return plain(e.status(), TEXT, format!("{e}\n")),
            }
        }
    };
    match_response(&engine, &params, &profile, None)
}

async fn match_post(State(engine): State<Shared>, RawQuery(q): RawQuery, body: String) -> HttpResponse {
    let params = query_params(q);
    let profile = match parse_sniffed(&body) {
        Ok(g) => g,
        Err(e) => return plain(400, TEXT, format!("profile is not Turtle or N-Triples: {e}\n")),
    };
    match_response(&engine, &params, &profile, param(&params, "subject"))
}

async fn register(State(engine): State<Shared>, RawQuery(q): RawQuery, req: Request) -> HttpResponse {
    let mut params = query_params(q);
    match read_payload(req).await {
        Ok(Payload::Fields(fields)) => params.extend(fields),
        Ok(_) => return plain(400, TEXT, "expected form fields body and features\n".into()),
        Err((status, message)) => return plain(status, TEXT, format!("{message}\n")),
    }
    let (Some(body), Some(features)) = (param(&params, "body"), param(&params, "features")) else {
        return plain(400, TEXT, "missing form field body or features\n".into());
    };
    let overwrite = matches!(param(&params, "overwrite"), Some("true" | "1" | "on"));
    let file = match FeaturesFile::parse(features) {
        Ok(f) => f,
        Err(e) => return plain(400, TEXT, format!("{e}\n")),
    };
    let template = file.into_template(body.to_owned());
    let id = template.full_id();
    match engine.register(template, overwrite) {
        Ok(()) => plain(201, TEXT, format!("registered {id}\n")),
        Err(e) => plain(e.status(), TEXT, format!("{e}\n")),
    }
}

async fn submission(State(engine): State<Shared>, Path(id): Path<String>) -> HttpResponse {
    let found = id.parse::<u64>().ok().and_then(|n| engine.submissions().get(n));
    match found {
        Some(g) => plain(200, TURTLE, serialize_turtle_with_prefixes(&g, engine.prefixes())),
        None => plain(404, TEXT, format!("submission {id} not found\n")),
    }
}
