//! The HTTP rendering channel.
//!
//! [`parse_request`] validates the GET/POST parameters, [`Engine`] fetches
//! or accepts the data, picks a template and renders it, and [`server`]
//! exposes everything over HTTP.

pub mod config;
pub mod engine;
pub mod fetch;
pub mod request;
pub mod server;
pub mod submissions;

pub use config::{Config, ConfigError};
pub use engine::{error_page, Engine, EngineBuilder, EngineError, HandleError, MatchReport, Response, Selection};
pub use fetch::{FetchError, HttpFetcher, SourceFetcher};
pub use request::{parse_request, Action, Method, ProviderId, RenderRequest, RequestError};
pub use submissions::{SubmissionError, SubmissionStore};
