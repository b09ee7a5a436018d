//! `semrender` command-line tool.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;
use url::Url;

use semrender_channel::server::{self, report_json, ServeError};
use semrender_channel::{Config, ConfigError, Engine, EngineError, HandleError, ProviderId};
use semrender_core::element_ref::{parse_element_ref, ElementRef};
use semrender_core::markup::{document, MarkupFormat};
use semrender_core::rdf::{parse_sniffed, Graph, ParseError};
use semrender_core::registry::{FeaturesFile, RegistryError, TemplateKind};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_FOUND: u8 = 3;
const EXIT_NETWORK: u8 = 4;
const EXIT_PARSE: u8 = 5;

#[derive(Parser)]
#[command(name = "semrender", version, about = "Render semantic data through registered templates")]
struct Cli {
    /// Configuration file.
    #[arg(long, global = true, default_value = "semrender.conf")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP channel.
    Serve {
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        port: Option<u16>,
    },
    /// Render an element of a data source to standard output.
    Render {
        /// Element reference, e.g. foaf.Person.
        #[arg(long)]
        object: String,
        /// Data file or http(s) URL.
        #[arg(long, required_unless_present = "input")]
        source: Option<String>,
        /// Template provider (designer id).
        #[arg(long, requires = "design")]
        provider: Option<String>,
        /// Template design id.
        #[arg(long, requires = "provider")]
        design: Option<String>,
        /// User profile file or URL, used when no template is named.
        #[arg(long, conflicts_with = "provider")]
        profile: Option<String>,
        #[arg(long, default_value = "HTML")]
        format: MarkupFormat,
        /// Render the input form instead of the data.
        #[arg(long)]
        input: bool,
    },
    /// Add a template to the registry.
    Register {
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        overwrite: bool,
    },
    /// List registered templates.
    List {
        #[arg(long)]
        object: Option<String>,
        #[arg(long, default_value = "output", value_parser = parse_kind)]
        kind: TemplateKind,
    },
    /// Describe an element of the configured ontologies.
    Describe {
        #[arg(long)]
        object: String,
    },
    /// Score the templates for an element against a user profile.
    Match {
        /// Profile file or URL.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        object: String,
        #[arg(long, default_value = "output", value_parser = parse_kind)]
        kind: TemplateKind,
        /// Profile subject fragment when the document holds several.
        #[arg(long)]
        subject: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Print the registry metadata graph as Turtle.
    Metadata,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Handle(#[from] HandleError),
    #[error(transparent)]
    Serve(#[from] ServeError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path} is not Turtle or N-Triples: {source}")]
    Parse { path: String, source: ParseError },
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Read { source, .. } if source.kind() == io::ErrorKind::NotFound => EXIT_NOT_FOUND,
            CliError::Read { .. } => EXIT_FAILURE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Config(ConfigError::Read { source, .. }) if source.kind() == io::ErrorKind::NotFound => {
                EXIT_NOT_FOUND
            }
            CliError::Config(ConfigError::Read { .. }) => EXIT_FAILURE,
            CliError::Config(_) => EXIT_PARSE,
            CliError::Engine(e) => engine_code(e),
            CliError::Serve(ServeError::Engine(e)) => engine_code(e),
            CliError::Serve(_) => EXIT_FAILURE,
            CliError::Registry(e) => registry_code(e),
            CliError::Handle(e) => match e {
                HandleError::Fetch(_) => EXIT_NETWORK,
                HandleError::SourceParse { .. } | HandleError::BodyParse(_) => EXIT_PARSE,
                HandleError::Registry(r) => registry_code(r),
                other => match other.status() {
                    404 => EXIT_NOT_FOUND,
                    400 => EXIT_USAGE,
                    _ => EXIT_FAILURE,
                },
            },
        }
    }
}

fn engine_code(e: &EngineError) -> u8 {
    match e {
        EngineError::Read { source, .. } if source.kind() == io::ErrorKind::NotFound => EXIT_NOT_FOUND,
        EngineError::Parse { .. } | EngineError::Aux { .. } | EngineError::Alignments { .. } => EXIT_PARSE,
        EngineError::Registry(r) => registry_code(r),
        _ => EXIT_FAILURE,
    }
}

fn registry_code(e: &RegistryError) -> u8 {
    match e {
        RegistryError::NotFound { .. } => EXIT_NOT_FOUND,
        RegistryError::Body(_) | RegistryError::Features(_) | RegistryError::Corrupt { .. } => EXIT_PARSE,
        RegistryError::Duplicate { .. } => EXIT_USAGE,
        RegistryError::Io { .. } => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("semrender: cannot start runtime: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    match runtime.block_on(run(cli)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("semrender: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn parse_kind(text: &str) -> Result<TemplateKind, String> {
    text.parse().map_err(|_| format!("expected input or output, got {text:?}"))
}

fn element(text: &str) -> Result<ElementRef, CliError> {
    parse_element_ref(text).map_err(|e| CliError::Usage(e.to_string()))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn remote(location: &str) -> Option<Url> {
    Url::parse(location)
        .ok()
        .filter(|u| matches!(u.scheme(), "http" | "https"))
}

/// Loads a graph from a local file or an http(s) URL. Returns the URL when
/// the graph came from one.
async fn load_graph(engine: &Engine, location: &str) -> Result<(Graph, Option<Url>), CliError> {
    if let Some(url) = remote(location) {
        let g = engine.fetch_graph(&url).await?;
        return Ok((g, Some(url)));
    }
    let text = read(Path::new(location))?;
    let g = parse_sniffed(&text).map_err(|source| CliError::Parse {
        path: location.to_owned(),
        source,
    })?;
    Ok((g, None))
}

fn engine(config: &Config) -> Result<Engine, CliError> {
    Ok(Engine::from_config(config)?)
}

async fn run(cli: Cli) -> Result<String, CliError> {
    let mut config = Config::load(&cli.config)?;
    match cli.command {
        Command::Serve { host, port } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env()
                        .unwrap_or_else(|_| "info".into()),
                )
                .init();
            if let Some(h) = host {
                config.host = h;
            }
            if let Some(p) = port {
                config.port = p;
            }
            server::serve(&config).await?;
            Ok(String::new())
        }
        Command::Render {
            object,
            source,
            provider,
            design,
            profile,
            format,
            input,
        } => {
            let engine = engine(&config)?;
            let object = element(&object)?;
            let provider: Option<ProviderId> = match (provider, design) {
                (Some(p), Some(d)) => Some(
                    format!("{p}.{d}")
                        .parse()
                        .map_err(|e: semrender_channel::RequestError| CliError::Usage(e.to_string()))?,
                ),
                _ => None,
            };
            let profile = match profile {
                Some(loc) => {
                    let (g, url) = load_graph(&engine, &loc).await?;
                    Some((g, url.and_then(|u| u.fragment().map(str::to_owned))))
                }
                None => None,
            };
            let kind = if input { TemplateKind::Input } else { TemplateKind::Output };
            let selection = engine.select_template(&object, kind, provider.as_ref(), profile.as_ref())?;
            for note in &selection.notes {
                eprintln!("semrender: note: {note}");
            }
            let content = if input {
                let mut params = vec![
                    ("action".to_owned(), "renderInput".to_owned()),
                    ("object".to_owned(), object.to_string()),
                    ("outputFormat".to_owned(), format.to_string()),
                ];
                if let Some(t) = &selection.template {
                    params.push(("provider".to_owned(), t.full_id()));
                }
                let response = engine
                    .handle_params(semrender_channel::Method::Get, &params, None)
                    .await;
                if response.status != 200 {
                    return Err(CliError::Usage(format!("input form failed with status {}", response.status)));
                }
                return Ok(response.body);
            } else {
                let source = source.ok_or_else(|| CliError::Usage("--source is required".into()))?;
                let (data, url) = load_graph(&engine, &source).await?;
                engine.render_output(
                    &data,
                    url.as_ref().map(Url::as_str),
                    &object,
                    selection.template.as_ref(),
                    None,
                )?
            };
            Ok(document(format, &object.to_string(), &content))
        }
        Command::Register {
            body,
            features,
            overwrite,
        } => {
            let engine = engine(&config)?;
            let file = FeaturesFile::parse(&read(&features)?).map_err(RegistryError::Features)?;
            let template = file.into_template(read(&body)?);
            let id = template.full_id();
            engine.register(template, overwrite)?;
            Ok(format!("registered {id}\n"))
        }
        Command::List { object, kind } => {
            let engine = engine(&config)?;
            let templates = match object {
                Some(o) => engine.registry().list_for(&element(&o)?, kind),
                None => engine.registry().snapshot().all().into_iter().cloned().collect(),
            };
            let mut out = String::new();
            for t in templates {
                let f = &t.features;
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}/{}\n",
                    t.full_id(),
                    t.target,
                    f.kind,
                    f.markup_format,
                    f.aesthetic,
                    f.primary_color,
                    f.secondary_color
                ));
            }
            Ok(out)
        }
        Command::Describe { object } => {
            let engine = engine(&config)?;
            Ok(engine.describe(&element(&object)?)?)
        }
        Command::Match {
            profile,
            object,
            kind,
            subject,
            json,
        } => {
            let engine = engine(&config)?;
            let object = element(&object)?;
            let (graph, url) = load_graph(&engine, &profile).await?;
            let fragment = subject.or_else(|| url.and_then(|u| u.fragment().map(str::to_owned)));
            let report = engine.match_profile(&object, kind, &graph, fragment.as_deref())?;
            if json {
                let value = report_json(&object.to_string(), &report);
                return Ok(format!("{value:#}\n"));
            }
            let mut out = String::new();
            let p = &report.profile;
            let show = |t: &Option<semrender_core::rdf::Term>| {
                t.as_ref().map_or_else(|| "-".to_owned(), |t| t.value().to_owned())
            };
            out.push_str(&format!(
                "profile: subject {} protocol {} aesthetic {} impairments [{}]\n",
                show(&p.subject),
                show(&p.protocol),
                show(&p.aesthetic),
                p.impairments.iter().map(|t| t.value()).collect::<Vec<_>>().join(", ")
            ));
            for (i, s) in report.scores.iter().enumerate() {
                out.push_str(&format!(
                    "{}. {} total {} (aesthetic {}, color {}){}\n",
                    i + 1,
                    s.template,
                    s.total,
                    s.aesthetic_distance,
                    s.color_penalty,
                    if s.hard_pass { "" } else { " excluded" }
                ));
                for line in &s.trace {
                    out.push_str(&format!("   {line}\n"));
                }
            }
            match report.best() {
                Some(b) => out.push_str(&format!("best: {}\n", b.template)),
                None => out.push_str("best: none (default visualization)\n"),
            }
            Ok(out)
        }
        Command::Metadata => Ok(engine(&config)?.metadata_turtle()),
    }
}
