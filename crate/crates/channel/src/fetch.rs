//! Fetching remote semantic data.

use std::time::Duration;

use async_trait::async_trait;
use thiserror::Error;
use url::Url;

pub const FETCH_TIMEOUT: Duration = Duration::from_secs(10);
pub const MAX_SOURCE_BYTES: usize = 10 * 1024 * 1024;
pub const MAX_REDIRECTS: usize = 3;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unsupported URL scheme in {0}")]
    Scheme(Url),
    #[error("fetching {url} failed: {reason}")]
    Network { url: Url, reason: String },
    #[error("fetching {url} returned HTTP {status}")]
    Status { url: Url, status: u16 },
    #[error("{url} exceeds the {limit}-byte source limit")]
    TooLarge { url: Url, limit: usize },
    #[error("{0} is not UTF-8 text")]
    Encoding(Url),
}

#[async_trait]
pub trait SourceFetcher: Send + Sync {
    async fn fetch(&self, url: &Url) -> Result<String, FetchError>;
}

/// HTTP(S) fetcher with a timeout, a redirect limit and a size cap.
pub struct HttpFetcher {
    client: reqwest::Client,
    limit: usize,
}

impl HttpFetcher {
    pub fn new() -> HttpFetcher {
        HttpFetcher::with_limit(MAX_SOURCE_BYTES)
    }

    pub fn with_limit(limit: usize) -> HttpFetcher {
        let client = reqwest::Client::builder()
            .timeout(FETCH_TIMEOUT)
            .redirect(reqwest::redirect::Policy::limited(MAX_REDIRECTS))
            .build()
            .expect("static client configuration");
        HttpFetcher { client, limit }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new()
    }
}

#[async_trait]
impl SourceFetcher for HttpFetcher {
    async fn fetch(&self, url: &Url) -> Result<String, FetchError> {
        if !matches!(url.scheme(), "http" | "https") {
            return Err(FetchError::Scheme(url.clone()));
        }
        let network = |e: reqwest::Error| FetchError::Network {
            url: url.clone(),
            reason: e.to_string(),
        };
        let mut response = self
            .client
            .get(url.clone())
            .header(
                reqwest::header::ACCEPT,
                "text/turtle, application/n-triples;q=0.9, */*;q=0.1",
            )
            .send()
            .await
            .map_err(network)?;
        let status = response.status();
        if !status.is_success() {
            return Err(FetchError::Status {
                url: url.clone(),
                status: status.as_u16(),
            });
        }
        let too_large = || FetchError::TooLarge {
            url: url.clone(),
            limit: self.limit,
        };
        if response.content_length().is_some_and(|n| n > self.limit as u64) {
            return Err(too_large());
        }
        let mut bytes = Vec::new();
        while let Some(chunk) = response.chunk().await.map_err(network)? {
            if bytes.len() + chunk.len() > self.limit {
                return Err(too_large());
            }
            bytes.extend_from_slice(&chunk);
        }
        String::from_utf8(bytes).map_err(|_| FetchError::Encoding(url.clone()))
    }
}
