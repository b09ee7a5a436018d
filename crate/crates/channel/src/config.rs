//! Flat `key = value` server configuration.
//!
//! ```text
//! host = 127.0.0.1
//! port = 8080
//! baseURL = http://localhost:8080
//! storageDir = registry
//! uiDir = ui
//! prefix.foaf = http://xmlns.com/foaf/0.1/
//! prefix.foaf@20050603 = http://xmlns.com/foaf/0.1/
//! ontology = foaf.ttl
//! aux.protocols = z1.ttl
//! aux.aesthetics = z3.ttl
//! aux.impairments = z5.ttl
//! alignments = alignments.ttl
//! weight.aesthetic = 1
//! weight.primaryColor = 2
//! weight.secondaryColor = 1
//! ```
//!
//! `ontology` may repeat. Relative paths resolve against the config file's
//! directory.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use semrender_core::matcher::ScoreWeights;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: key {key:?} given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("config line {line}: invalid value {value:?} for {key}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixSetting {
    pub prefix: String,
    pub version: Option<String>,
    pub namespace: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub host: String,
    pub port: u16,
    base_url: Option<String>,
    pub storage_dir: PathBuf,
    pub ui_dir: Option<PathBuf>,
    pub prefixes: Vec<PrefixSetting>,
    pub ontologies: Vec<PathBuf>,
    pub protocols: Option<PathBuf>,
    pub aesthetics: Option<PathBuf>,
    pub impairments: Option<PathBuf>,
    pub alignments: Option<PathBuf>,
    pub weights: ScoreWeights,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            host: "127.0.0.1".into(),
            port: 8080,
            base_url: None,
            storage_dir: PathBuf::from("storage"),
            ui_dir: None,
            prefixes: Vec::new(),
            ontologies: Vec::new(),
            protocols: None,
            aesthetics: None,
            impairments: None,
            alignments: None,
            weights: ScoreWeights::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        Config::parse(&text, dir)
    }

    /// Parses config text, resolving relative paths against `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Config, ConfigError> {
        let mut c = Config::default();
        let mut seen = std::collections::BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key != "ontology" && !seen.insert(key.to_owned()) {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_owned(),
                });
            }
            let invalid = || ConfigError::InvalidValue {
                line,
                key: key.to_owned(),
                value: value.to_owned(),
            };
            let path = || dir.join(value);
            let weight = || value.parse::<u64>().map_err(|_| invalid());
            match key {
                "host" => c.host = value.to_owned(),
                "port" => c.port = value.parse().map_err(|_| invalid())?,
                "baseURL" => c.base_url = Some(value.trim_end_matches('/').to_owned()),
                "storageDir" => c.storage_dir = path(),
                "uiDir" => c.ui_dir = Some(path()),
                "ontology" => c.ontologies.push(path()),
                "aux.protocols" => c.protocols = Some(path()),
                "aux.aesthetics" => c.aesthetics = Some(path()),
                "aux.impairments" => c.impairments = Some(path()),
                "alignments" => c.alignments = Some(path()),
                "weight.aesthetic" => c.weights.aesthetic = weight()?,
                "weight.primaryColor" => c.weights.primary_color = weight()?,
                "weight.secondaryColor" => c.weights.secondary_color = weight()?,
                _ => {
                    let Some(spec) = key.strip_prefix("prefix.") else {
                        return Err(ConfigError::UnknownKey {
                            line,
                            key: key.to_owned(),
                        });
                    };
                    let (prefix, version) = match spec.split_once('@') {
                        Some((p, v)) => (p, Some(v.to_owned())),
                        None => (spec, None),
                    };
                    if prefix.is_empty() || version.as_deref() == Some("") || value.is_empty() {
                        return Err(invalid());
                    }
                    c.prefixes.push(PrefixSetting {
                        prefix: prefix.to_owned(),
                        version,
                        namespace: value.to_owned(),
                    });
                }
            }
        }
        Ok(c)
    }

    /// The configured base URL, or one derived from host and port.
    pub fn base_url(&self) -> String {
        self.base_url
            .clone()
            .unwrap_or_else(|| format!("http://{}:{}", self.host, self.port))
    }

    pub fn set_base_url(&mut self, url: impl Into<String>) {
        self.base_url = Some(url.into().trim_end_matches('/').to_owned());
    }
}
