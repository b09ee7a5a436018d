#![allow(dead_code)]

use std::collections::HashMap;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::extract::{Path as UrlPath, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;

use semrender_channel::server;
use semrender_channel::{Config, Engine};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read_fixture(name: &str) -> String {
    fs::read_to_string(fixtures().join(name)).unwrap()
}

/// Copies the fixture template registry into `dst`.
pub fn copy_registry(dst: &Path) {
    let src = fixtures().join("registry/templates");
    for provider in fs::read_dir(&src).unwrap() {
        let provider = provider.unwrap().path();
        let target = dst.join("templates").join(provider.file_name().unwrap());
        fs::create_dir_all(&target).unwrap();
        for file in fs::read_dir(&provider).unwrap() {
            let file = file.unwrap().path();
            fs::copy(&file, target.join(file.file_name().unwrap())).unwrap();
        }
    }
}

/// The fixture configuration with storage moved to `storage` (a copy of the
/// fixture registry) and the given base URL.
pub fn fixture_config(storage: &Path, base_url: &str) -> Config {
    copy_registry(storage);
    let mut config = Config::load(&fixtures().join("semrender.conf")).unwrap();
    config.storage_dir = storage.to_owned();
    config.set_base_url(base_url);
    config
}

type Files = Arc<RwLock<HashMap<String, String>>>;

/// Serves in-memory documents over HTTP.
pub struct DataServer {
    pub addr: SocketAddr,
    files: Files,
}

async fn serve_file(State(files): State<Files>, UrlPath(path): UrlPath<String>) -> axum::response::Response {
    match files.read().unwrap().get(&path) {
        Some(body) => (StatusCode::OK, [(header::CONTENT_TYPE, "text/turtle")], body.clone()).into_response(),
        None => StatusCode::NOT_FOUND.into_response(),
    }
}

impl DataServer {
    pub async fn start() -> DataServer {
        let files: Files = Arc::default();
        let app = Router::new()
            .route("/{*path}", get(serve_file))
            .with_state(files.clone());
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        tokio::spawn(async move {
            axum::serve(listener, app).await.unwrap();
        });
        DataServer { addr, files }
    }

    /// Publishes `body` at `/path` and returns its URL.
    pub fn put(&self, path: &str, body: impl Into<String>) -> String {
        self.files.write().unwrap().insert(path.to_owned(), body.into());
        self.url(path)
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}/{}", self.addr, path)
    }
}

/// Starts the channel for the fixture configuration on an ephemeral port.
/// Returns the engine's base URL.
pub async fn start_channel(storage: &Path) -> (String, Arc<Engine>) {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let engine = Arc::new(Engine::from_config(&fixture_config(storage, &base)).unwrap());
    server::spawn(engine.clone(), None, listener).await;
    (base, engine)
}

pub fn well_formed_xml(text: &str) -> Result<(), String> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    roxmltree::Document::parse_with_options(text, opts)
        .map(|_| ())
        .map_err(|e| e.to_string())
}

pub fn query(pairs: &[(&str, &str)]) -> String {
    let mut s = form_urlencoded::Serializer::new(String::new());
    for (k, v) in pairs {
        s.append_pair(k, v);
    }
    s.finish()
}
